#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace footpath {

// Boolean raster, row-major, true = footpath. Tiles are 256×256; other sizes
// appear in tests and when several tiles are stitched into one grid.
class BinaryMask {
 public:
  BinaryMask() : BinaryMask(256, 256) {}
  BinaryMask(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return cells_.size(); }

  bool at(int col, int row) const { return cells_[index(col, row)] != 0; }
  void set(int col, int row, bool v) { cells_[index(col, row)] = v ? 1 : 0; }
  // Out-of-range reads are background; convenient for neighbourhood scans.
  bool at_or_false(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_ && row < height_ && at(col, row);
  }

  std::size_t count() const noexcept;
  std::span<const std::uint8_t> cells() const noexcept { return cells_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> cells_;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // width*height*3
};

using Bytes = std::vector<std::uint8_t>;

// 8-bit grayscale PNG, foreground = 255, background = 0.
Bytes encode_mask_png(const BinaryMask& mask);
// Accepts any PNG colour type/depth; a pixel is foreground when its 8-bit
// gray value is >= 128.
BinaryMask decode_mask_png(std::span<const std::uint8_t> data);

Bytes encode_rgb_png(const RgbImage& image);
// PNG or JPEG, detected from the signature.
RgbImage decode_image(std::span<const std::uint8_t> data);

BinaryMask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

Bytes read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it into place; creates parent dirs.
void atomic_write(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void atomic_write(const std::filesystem::path& path, std::string_view text);

}  // namespace footpath
