#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace axsynth {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Packed 8-bit RGB raster, row-major, no padding.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  Rgb at(int x, int y) const {
    const std::size_t i = index(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = index(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  // Fills the clipped rectangle [x, x+w) x [y, y+h).
  void fill_rect(int x, int y, int w, int h, Rgb c);

  std::span<const std::uint8_t> bytes() const { return pixels_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// PNG (any bit depth/colour type, alpha dropped) or binary PPM (P6).
// Throws Error when the data cannot be decoded.
Raster decode_image(std::span<const std::uint8_t> data);
Raster read_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Raster& raster);
void write_png(const std::filesystem::path& path, const Raster& raster);

}  // namespace axsynth
