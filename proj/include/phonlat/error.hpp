// Copyright 2026 The Phonlat Authors
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

#ifndef PHONLAT_ERROR_HPP_
#define PHONLAT_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phonlat {

// Base class for every failure raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data.  When the offending file and line are known the
// message is prefixed with "file:line:" so callers can report them directly.
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
  DataError(const std::string& file, std::size_t line, const std::string& msg)
      : Error(file + ":" + std::to_string(line) + ": " + msg) {}
};

}  // namespace phonlat

#endif  // PHONLAT_ERROR_HPP_
