// Copyright 2026 The heatleak Authors.
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

#ifndef HEATLEAK_ERROR_HPP
#define HEATLEAK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace heatleak {

enum class ErrorKind {
  invalid_argument,
  domain,
  io,
  parse,
};

// Every failure raised by the library derives from Error; the C API maps
// kind() onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error invalid_argument(const std::string& what) {
  return Error(ErrorKind::invalid_argument, what);
}

}  // namespace heatleak

#endif  // HEATLEAK_ERROR_HPP
