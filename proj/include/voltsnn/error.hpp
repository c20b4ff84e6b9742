/*
 *    Copyright 2026 The voltsnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOLTSNN_ERROR_HPP
#define VOLTSNN_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace voltsnn
{

/// Root of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument is outside its domain (non-finite weight, probability
/// outside [0,1], code wider than its format, ...).
class InvalidValue : public Error
{
public:
  using Error::Error;
};

/// An address index is not below its geometry bound.
class AddressError : public Error
{
public:
  AddressError(std::string dimension, std::size_t index, std::size_t bound, const std::string& context = {})
      : Error("address " + dimension + " index " + std::to_string(index) + " out of range (bound " + std::to_string(bound) + ")" +
              (context.empty() ? "" : " at " + context)),
        dimension_(std::move(dimension)), index_(index), bound_(bound)
  {
  }

  const std::string& dimension() const noexcept { return dimension_; }
  std::size_t index() const noexcept { return index_; }
  std::size_t bound() const noexcept { return bound_; }

private:
  std::string dimension_;
  std::size_t index_;
  std::size_t bound_;
};

/// Not enough (safe) DRAM to hold the requested data.
class CapacityError : public Error
{
public:
  CapacityError(std::size_t needed, std::size_t available)
      : Error("insufficient DRAM capacity: " + std::to_string(needed) + " bytes needed, " + std::to_string(available) + " available"),
        needed_(needed), available_(available)
  {
  }

  std::size_t needed() const noexcept { return needed_; }
  std::size_t available() const noexcept { return available_; }

private:
  std::size_t needed_;
  std::size_t available_;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Missing or malformed input files (datasets, checkpoints, traces).
class DataError : public Error
{
public:
  using Error::Error;
};

} // namespace voltsnn

#endif
