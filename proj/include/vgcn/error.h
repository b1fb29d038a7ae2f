// Copyright 2026 The VGCN Authors
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

#ifndef VGCN_ERROR_H_
#define VGCN_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vgcn {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data violates a structural precondition (wrong joint count, score
// outside [0,1], negative category, ...).
class MalformedInput : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class MissingClass : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

// Tensor shape mismatch. Carries the expected and actual extents.
class ShapeError : public Error {
 public:
  ShapeError(const std::string& what, std::vector<std::size_t> expected,
             std::vector<std::size_t> actual);

  const std::vector<std::size_t>& expected() const { return expected_; }
  const std::vector<std::size_t>& actual() const { return actual_; }

 private:
  std::vector<std::size_t> expected_;
  std::vector<std::size_t> actual_;
};

// Schema violation while reading a data file; `line` is 1-based, 0 when the
// error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string format_shape(const std::vector<std::size_t>& shape);

}  // namespace vgcn

#endif  // VGCN_ERROR_H_
