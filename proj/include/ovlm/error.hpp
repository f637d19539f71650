// Copyright 2026 The ovlm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OVLM_ERROR_HPP_
#define OVLM_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace ovlm {

// Data-level failure with a stable machine-readable code ("encoding",
// "vocab-mismatch", ...). The CLI maps these to exit code 2; anything else
// that escapes is a genuine bug.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace ovlm

#endif  // OVLM_ERROR_HPP_
