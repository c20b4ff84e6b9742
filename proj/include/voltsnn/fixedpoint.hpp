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

#ifndef VOLTSNN_FIXEDPOINT_HPP
#define VOLTSNN_FIXEDPOINT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "voltsnn/matrix.hpp"
#include "voltsnn/rng.hpp"

namespace voltsnn
{

enum class Rounding { Truncate, Nearest, Stochastic };

/// "tr", "rn" or "sr" (case-insensitive).
Rounding parse_rounding(std::string_view name);
std::string to_string(Rounding mode);

/// Qi.f layout: optional sign bit, i integer bits, f fraction bits.
/// Codes are plain integers; value = code * 2^-f.
class FixedPointFormat
{
public:
  FixedPointFormat(bool is_signed, int integer_bits, int fraction_bits);

  bool is_signed() const noexcept { return signed_; }
  int integer_bits() const noexcept { return integer_bits_; }
  int fraction_bits() const noexcept { return fraction_bits_; }
  int total_bits() const noexcept { return (signed_ ? 1 : 0) + integer_bits_ + fraction_bits_; }

  /// Precision step 2^-f.
  double step() const noexcept;
  std::int64_t min_code() const noexcept;
  std::int64_t max_code() const noexcept;
  double min_value() const noexcept { return static_cast<double>(min_code()) * step(); }
  double max_value() const noexcept { return static_cast<double>(max_code()) * step(); }

  /// Raw total_bits-wide pattern (two's complement when signed).
  std::uint32_t to_bits(std::int64_t code) const;
  /// Inverse of to_bits; sign-extends signed formats.
  std::int64_t from_bits(std::uint32_t bits) const noexcept;

  bool operator==(const FixedPointFormat&) const = default;

private:
  bool signed_;
  int integer_bits_;
  int fraction_bits_;
};

/// Quantizes one value. Out-of-range values saturate; non-finite values throw
/// InvalidValue. `rng` is only drawn from under Rounding::Stochastic.
std::int64_t quantize(double value, const FixedPointFormat& fmt, Rounding rounding, Rng& rng);
/// Deterministic modes only; throws InvalidValue for Rounding::Stochastic.
std::int64_t quantize(double value, const FixedPointFormat& fmt, Rounding rounding);

/// code * 2^-f. Throws InvalidValue when code is outside the format's range.
double dequantize(std::int64_t code, const FixedPointFormat& fmt);

/// Storage format of a weight tensor: IEEE fp32 pass-through or fixed point.
class WeightFormat
{
public:
  static WeightFormat fp32() { return WeightFormat(); }
  explicit WeightFormat(FixedPointFormat fixed) : fixed_(fixed), is_float_(false) {}

  /// "fp32" or "fxp<N>_<signed|unsigned>_q<i>_<f>", e.g. "fxp8_signed_q1_6".
  static WeightFormat parse(std::string_view name);
  std::string name() const;

  bool is_float() const noexcept { return is_float_; }
  /// Precondition: !is_float().
  const FixedPointFormat& fixed() const;
  int bit_width() const noexcept { return is_float_ ? 32 : fixed_.total_bits(); }
  /// Bytes occupied in DRAM per element.
  int bytes_per_element() const noexcept { return (bit_width() + 7) / 8; }

  bool operator==(const WeightFormat&) const = default;

private:
  WeightFormat() : fixed_(false, 0, 0), is_float_(true) {}

  FixedPointFormat fixed_;
  bool is_float_;
};

/// Weights as stored in memory: one raw bit pattern per element.
/// For fixed-point formats the pattern is the (two's complement) code; for
/// fp32 it is the IEEE-754 encoding.
struct QuantizedTensor
{
  WeightFormat format = WeightFormat::fp32();
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint32_t> words;

  std::size_t size() const noexcept { return words.size(); }
  std::size_t byte_size() const noexcept { return words.size() * static_cast<std::size_t>(format.bytes_per_element()); }

  /// Signed code of element i. Precondition: fixed-point format.
  std::int64_t code(std::size_t i) const;
  /// Real value of element i (dequantized or reinterpreted fp32).
  double value(std::size_t i) const;

  bool operator==(const QuantizedTensor&) const = default;
};

/// Elementwise quantize; shape preserved. fp32 stores the bit patterns as-is.
QuantizedTensor quantize_tensor(const WeightMatrix& weights, const WeightFormat& fmt, Rounding rounding, Rng& rng);
QuantizedTensor quantize_tensor(const WeightMatrix& weights, const WeightFormat& fmt, Rounding rounding);
WeightMatrix dequantize_tensor(const QuantizedTensor& tensor);

} // namespace voltsnn

#endif
