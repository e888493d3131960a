// Copyright 2026 The pdmspikes Authors.
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

#ifndef PDMSPIKES_ERRORS_HPP
#define PDMSPIKES_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pdmspikes {

// Base of every exception thrown by the library. The C API maps each
// subclass onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (AER, WAV, CSV). `index` is the offending event or
// byte position when one is known, otherwise -1.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::int64_t index = -1)
      : Error(what), index_(index) {}
  std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::uint64_t offset)
      : Error(what), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdmspikes

#endif  // PDMSPIKES_ERRORS_HPP
