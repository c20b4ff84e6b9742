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

#include "voltsnn/fixedpoint.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>

#include "voltsnn/error.hpp"

namespace voltsnn
{

namespace
{
std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

int parse_int(std::string_view s, std::string_view context)
{
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidValue("malformed weight format '" + std::string(context) + "'");
  return v;
}

std::int64_t round_scaled(double scaled, Rounding rounding, Rng* rng)
{
  switch (rounding) {
  case Rounding::Truncate:
    return static_cast<std::int64_t>(std::floor(scaled));
  case Rounding::Nearest:
    return static_cast<std::int64_t>(std::round(scaled)); // ties away from zero
  case Rounding::Stochastic: {
    const double lo = std::floor(scaled);
    const double frac = scaled - lo;
    return static_cast<std::int64_t>(lo) + (frac > 0.0 && uniform01(*rng) < frac ? 1 : 0);
  }
  }
  return 0;
}

std::int64_t quantize_impl(double value, const FixedPointFormat& fmt, Rounding rounding, Rng* rng)
{
  if (!std::isfinite(value))
    throw InvalidValue("invalid weight: non-finite value cannot be quantized");
  const double scaled = std::ldexp(value, fmt.fraction_bits());
  const auto lo = fmt.min_code();
  const auto hi = fmt.max_code();
  if (scaled >= static_cast<double>(hi))
    return hi;
  if (scaled <= static_cast<double>(lo))
    return lo;
  return std::clamp(round_scaled(scaled, rounding, rng), lo, hi);
}
} // namespace

Rounding parse_rounding(std::string_view name)
{
  const auto s = lower(name);
  if (s == "tr")
    return Rounding::Truncate;
  if (s == "rn")
    return Rounding::Nearest;
  if (s == "sr")
    return Rounding::Stochastic;
  throw InvalidValue("unknown rounding mode '" + std::string(name) + "' (expected tr, rn or sr)");
}

std::string to_string(Rounding mode)
{
  switch (mode) {
  case Rounding::Truncate:
    return "tr";
  case Rounding::Nearest:
    return "rn";
  case Rounding::Stochastic:
    return "sr";
  }
  return "?";
}

FixedPointFormat::FixedPointFormat(bool is_signed, int integer_bits, int fraction_bits)
    : signed_(is_signed), integer_bits_(integer_bits), fraction_bits_(fraction_bits)
{
  if (integer_bits < 0 || fraction_bits < 0)
    throw InvalidValue("fixed-point bit counts must be non-negative");
  if (total_bits() > 32)
    throw InvalidValue("fixed-point formats wider than 32 bits are not supported");
}

double FixedPointFormat::step() const noexcept { return std::ldexp(1.0, -fraction_bits_); }

std::int64_t FixedPointFormat::min_code() const noexcept
{
  return signed_ ? -(std::int64_t{1} << (integer_bits_ + fraction_bits_)) : 0;
}

std::int64_t FixedPointFormat::max_code() const noexcept { return (std::int64_t{1} << (integer_bits_ + fraction_bits_)) - 1; }

std::uint32_t FixedPointFormat::to_bits(std::int64_t code) const
{
  if (code < min_code() || code > max_code())
    throw InvalidValue("code " + std::to_string(code) + " does not fit in " + std::to_string(total_bits()) + " bits");
  const auto mask = total_bits() == 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << total_bits()) - 1;
  return static_cast<std::uint32_t>(static_cast<std::uint64_t>(code) & mask);
}

std::int64_t FixedPointFormat::from_bits(std::uint32_t bits) const noexcept
{
  const int width = total_bits();
  const auto mask = width == 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  std::uint64_t v = bits & mask;
  if (signed_ && width > 0 && (v >> (width - 1)) & 1u)
    return static_cast<std::int64_t>(v) - (std::int64_t{1} << width);
  return static_cast<std::int64_t>(v);
}

std::int64_t quantize(double value, const FixedPointFormat& fmt, Rounding rounding, Rng& rng)
{
  return quantize_impl(value, fmt, rounding, &rng);
}

std::int64_t quantize(double value, const FixedPointFormat& fmt, Rounding rounding)
{
  if (rounding == Rounding::Stochastic)
    throw InvalidValue("stochastic rounding requires a random stream");
  return quantize_impl(value, fmt, rounding, nullptr);
}

double dequantize(std::int64_t code, const FixedPointFormat& fmt)
{
  if (code < fmt.min_code() || code > fmt.max_code())
    throw InvalidValue("code " + std::to_string(code) + " outside the " + std::to_string(fmt.total_bits()) + "-bit format range");
  return std::ldexp(static_cast<double>(code), -fmt.fraction_bits());
}

WeightFormat WeightFormat::parse(std::string_view name)
{
  const auto s = lower(name);
  if (s == "fp32")
    return fp32();
  // fxp<N>_<signed|unsigned>_q<i>_<f>
  auto fail = [&]() -> WeightFormat { throw InvalidValue("malformed weight format '" + std::string(name) + "'"); };
  if (!s.starts_with("fxp"))
    return fail();
  const auto u1 = s.find('_');
  if (u1 == std::string::npos)
    return fail();
  const int width = parse_int(std::string_view(s).substr(3, u1 - 3), name);
  const auto u2 = s.find('_', u1 + 1);
  if (u2 == std::string::npos)
    return fail();
  const auto signedness = std::string_view(s).substr(u1 + 1, u2 - u1 - 1);
  if (signedness != "signed" && signedness != "unsigned")
    return fail();
  if (s.size() < u2 + 2 || s[u2 + 1] != 'q')
    return fail();
  const auto u3 = s.find('_', u2 + 2);
  if (u3 == std::string::npos)
    return fail();
  const int ibits = parse_int(std::string_view(s).substr(u2 + 2, u3 - u2 - 2), name);
  const int fbits = parse_int(std::string_view(s).substr(u3 + 1), name);
  FixedPointFormat fmt(signedness == "signed", ibits, fbits);
  if (fmt.total_bits() != width)
    throw InvalidValue("weight format '" + std::string(name) + "' declares " + std::to_string(width) + " bits but its fields sum to " +
                       std::to_string(fmt.total_bits()));
  return WeightFormat(fmt);
}

std::string WeightFormat::name() const
{
  if (is_float_)
    return "fp32";
  return "fxp" + std::to_string(fixed_.total_bits()) + (fixed_.is_signed() ? "_signed_q" : "_unsigned_q") + std::to_string(fixed_.integer_bits()) + "_" +
         std::to_string(fixed_.fraction_bits());
}

const FixedPointFormat& WeightFormat::fixed() const
{
  if (is_float_)
    throw InvalidValue("fp32 has no fixed-point layout");
  return fixed_;
}

std::int64_t QuantizedTensor::code(std::size_t i) const { return format.fixed().from_bits(words.at(i)); }

double QuantizedTensor::value(std::size_t i) const
{
  if (format.is_float())
    return static_cast<double>(std::bit_cast<float>(words.at(i)));
  return std::ldexp(static_cast<double>(code(i)), -format.fixed().fraction_bits());
}

namespace
{
QuantizedTensor quantize_tensor_impl(const WeightMatrix& weights, const WeightFormat& fmt, Rounding rounding, Rng* rng)
{
  QuantizedTensor out{fmt, weights.rows(), weights.cols(), {}};
  out.words.reserve(weights.size());
  for (float w : weights.data()) {
    if (fmt.is_float()) {
      if (!std::isfinite(w))
        throw InvalidValue("invalid weight: non-finite value");
      out.words.push_back(std::bit_cast<std::uint32_t>(w));
    } else {
      out.words.push_back(fmt.fixed().to_bits(quantize_impl(w, fmt.fixed(), rounding, rng)));
    }
  }
  return out;
}
} // namespace

QuantizedTensor quantize_tensor(const WeightMatrix& weights, const WeightFormat& fmt, Rounding rounding, Rng& rng)
{
  return quantize_tensor_impl(weights, fmt, rounding, &rng);
}

QuantizedTensor quantize_tensor(const WeightMatrix& weights, const WeightFormat& fmt, Rounding rounding)
{
  if (rounding == Rounding::Stochastic && !fmt.is_float())
    throw InvalidValue("stochastic rounding requires a random stream");
  return quantize_tensor_impl(weights, fmt, rounding, nullptr);
}

WeightMatrix dequantize_tensor(const QuantizedTensor& tensor)
{
  std::vector<float> data(tensor.size());
  for (std::size_t i = 0; i < tensor.size(); ++i)
    data[i] = static_cast<float>(tensor.value(i));
  return WeightMatrix(tensor.rows, tensor.cols, std::move(data));
}

} // namespace voltsnn
