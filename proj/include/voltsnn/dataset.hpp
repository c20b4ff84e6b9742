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

#ifndef VOLTSNN_DATASET_HPP
#define VOLTSNN_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace voltsnn
{

/// Labeled images with intensities normalized to [0, 1].
class Dataset
{
public:
  Dataset() = default;
  Dataset(std::size_t height, std::size_t width) : height_(height), width_(width) {}

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t pixels() const noexcept { return height_ * width_; }

  std::span<const float> image(std::size_t i) const { return {pixels_.data() + i * pixels(), pixels()}; }
  int label(std::size_t i) const { return labels_[i]; }
  /// Largest label + 1.
  int classes() const noexcept { return classes_; }

  /// Throws InvalidValue on a size mismatch, an intensity outside [0, 1] or a negative label.
  void add(std::span<const float> image, int label);
  /// Samples [first, first + count), clipped to the dataset size.
  Dataset slice(std::size_t first, std::size_t count) const;

private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  int classes_ = 0;
  std::vector<float> pixels_;
  std::vector<int> labels_;
};

struct IdxImages
{
  std::size_t count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;
};

/// Reads an IDX image file (magic 0x00000803), gzipped or plain. Throws
/// DataError when the file is missing, truncated or has the wrong magic.
IdxImages read_idx_images(const std::string& path);
/// Reads an IDX label file (magic 0x00000801), gzipped or plain.
std::vector<std::uint8_t> read_idx_labels(const std::string& path);

/// Pairs an image file with a label file and scales pixels by 1/255.
/// `limit` = 0 loads everything.
Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path, std::size_t limit = 0);

/// Writes gzipped IDX files (used to build small fixtures).
void write_idx_images(const std::string& path, const IdxImages& images);
void write_idx_labels(const std::string& path, std::span<const std::uint8_t> labels);

/// Two-class toy set of `side` x `side` binary images: class 0 lights the
/// left half, class 1 the right half. Samples alternate 0, 1, 0, ...
Dataset make_toy_dataset(std::size_t samples, std::size_t side = 8);

} // namespace voltsnn

#endif
