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

#include "voltsnn/dataset.hpp"

#include <algorithm>
#include <memory>

#include <zlib.h>

#include "voltsnn/error.hpp"

namespace voltsnn
{

namespace
{
constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

// gzread passes plain files through unchanged, so one reader serves both.
struct GzCloser
{
  void operator()(gzFile f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser>;

class IdxReader
{
public:
  explicit IdxReader(const std::string& path) : path_(path), file_(gzopen(path.c_str(), "rb"))
  {
    if (!file_)
      throw DataError("cannot open " + path);
  }

  void read(void* dst, std::size_t n)
  {
    auto* out = static_cast<unsigned char*>(dst);
    while (n > 0) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30));
      const int got = gzread(file_.get(), out, chunk);
      if (got <= 0)
        throw DataError(path_ + ": truncated IDX file");
      out += got;
      n -= static_cast<std::size_t>(got);
    }
  }

  std::uint32_t u32()
  {
    unsigned char b[4];
    read(b, 4);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
  }

  void expect_magic(std::uint32_t magic)
  {
    const auto got = u32();
    if (got != magic)
      throw DataError(path_ + ": bad IDX magic " + std::to_string(got) + " (expected " + std::to_string(magic) + ")");
  }

private:
  std::string path_;
  GzHandle file_;
};

class IdxWriter
{
public:
  explicit IdxWriter(const std::string& path) : path_(path), file_(gzopen(path.c_str(), "wb9"))
  {
    if (!file_)
      throw DataError("cannot create " + path);
  }

  void write(const void* src, std::size_t n)
  {
    if (n > 0 && gzwrite(file_.get(), src, static_cast<unsigned>(n)) != static_cast<int>(n))
      throw DataError("write failed for " + path_);
  }

  void u32(std::uint32_t v)
  {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    write(b, 4);
  }

private:
  std::string path_;
  GzHandle file_;
};
} // namespace

void Dataset::add(std::span<const float> image, int label)
{
  if (image.size() != pixels())
    throw InvalidValue("image has " + std::to_string(image.size()) + " pixels, dataset expects " + std::to_string(pixels()));
  if (label < 0)
    throw InvalidValue("negative label " + std::to_string(label));
  for (float p : image)
    if (!(p >= 0.0f && p <= 1.0f))
      throw InvalidValue("pixel intensity " + std::to_string(p) + " outside [0, 1]");
  pixels_.insert(pixels_.end(), image.begin(), image.end());
  labels_.push_back(label);
  classes_ = std::max(classes_, label + 1);
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const
{
  Dataset out(height_, width_);
  const auto end = std::min(size(), first + count);
  for (auto i = std::min(first, end); i < end; ++i)
    out.add(image(i), label(i));
  return out;
}

IdxImages read_idx_images(const std::string& path)
{
  IdxReader in(path);
  in.expect_magic(kImageMagic);
  IdxImages out;
  out.count = in.u32();
  out.height = in.u32();
  out.width = in.u32();
  out.pixels.resize(out.count * out.height * out.width);
  in.read(out.pixels.data(), out.pixels.size());
  return out;
}

std::vector<std::uint8_t> read_idx_labels(const std::string& path)
{
  IdxReader in(path);
  in.expect_magic(kLabelMagic);
  std::vector<std::uint8_t> labels(in.u32());
  in.read(labels.data(), labels.size());
  return labels;
}

Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path, std::size_t limit)
{
  const auto images = read_idx_images(images_path);
  const auto labels = read_idx_labels(labels_path);
  if (labels.size() != images.count)
    throw DataError(images_path + " holds " + std::to_string(images.count) + " images but " + labels_path + " holds " +
                    std::to_string(labels.size()) + " labels");
  const auto n = limit == 0 ? images.count : std::min(limit, images.count);
  Dataset out(images.height, images.width);
  std::vector<float> buf(images.height * images.width);
  for (std::size_t i = 0; i < n; ++i) {
    const auto* src = images.pixels.data() + i * buf.size();
    std::transform(src, src + buf.size(), buf.begin(), [](std::uint8_t p) { return static_cast<float>(p) / 255.0f; });
    out.add(buf, labels[i]);
  }
  return out;
}

void write_idx_images(const std::string& path, const IdxImages& images)
{
  if (images.pixels.size() != images.count * images.height * images.width)
    throw InvalidValue("IDX image buffer size does not match its header");
  IdxWriter out(path);
  out.u32(kImageMagic);
  out.u32(static_cast<std::uint32_t>(images.count));
  out.u32(static_cast<std::uint32_t>(images.height));
  out.u32(static_cast<std::uint32_t>(images.width));
  out.write(images.pixels.data(), images.pixels.size());
}

void write_idx_labels(const std::string& path, std::span<const std::uint8_t> labels)
{
  IdxWriter out(path);
  out.u32(kLabelMagic);
  out.u32(static_cast<std::uint32_t>(labels.size()));
  out.write(labels.data(), labels.size());
}

Dataset make_toy_dataset(std::size_t samples, std::size_t side)
{
  if (side < 2)
    throw InvalidValue("toy images need side >= 2");
  Dataset out(side, side);
  std::vector<float> left(side * side, 0.0f), right(side * side, 0.0f);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c)
      (c < side / 2 ? left : right)[r * side + c] = 1.0f;
  for (std::size_t i = 0; i < samples; ++i)
    out.add(i % 2 == 0 ? left : right, static_cast<int>(i % 2));
  return out;
}

} // namespace voltsnn
