#include "axsynth/raster.h"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "axsynth/errors.h"
#include "axsynth/io.h"

namespace axsynth {
namespace {

struct ReadCursor {
  std::span<const std::uint8_t> data;
  std::size_t offset = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t len) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->offset + len > cur->data.size()) png_error(png, "truncated PNG");
  std::memcpy(out, cur->data.data() + cur->offset, len);
  cur->offset += len;
}

void png_write_to_vector(png_structp png, png_bytep in, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + len);
}

void png_flush_noop(png_structp) {}

// libpng reports failures by longjmp; the message is stashed here and the
// caller converts it into an exception once it is back in C++ frames.
struct PngErrorState {
  char message[256] = "unknown error";
};

void png_error_to_state(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof state->message, "%s", msg);
  std::longjmp(png_jmpbuf(png), 1);
}

void png_warn_ignore(png_structp, png_const_charp) {}

// Objects touched after setjmp are owned by the caller.
bool decode_png_rows(png_structp png, png_infop info, Raster* out,
                     std::vector<std::uint8_t>* row) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);
  if (png_get_rowbytes(png, info) != static_cast<png_size_t>(width) * 3) {
    png_error(png, "unsupported pixel layout");
  }
  *out = Raster(static_cast<int>(width), static_cast<int>(height));
  row->resize(static_cast<std::size_t>(width) * 3);
  for (png_uint_32 y = 0; y < height; ++y) {
    png_read_row(png, row->data(), nullptr);
    for (png_uint_32 x = 0; x < width; ++x) {
      out->set(static_cast<int>(x), static_cast<int>(y),
               {(*row)[x * 3], (*row)[x * 3 + 1], (*row)[x * 3 + 2]});
    }
  }
  return true;
}

Raster decode_png(std::span<const std::uint8_t> data) {
  PngErrorState state;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state,
                                           png_error_to_state, png_warn_ignore);
  if (!png) throw Error("PNG: cannot allocate decoder");
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{data, 0};
  png_set_read_fn(png, &cursor, png_read_from_span);
  Raster raster;
  std::vector<std::uint8_t> row;
  const bool ok = info && decode_png_rows(png, info, &raster, &row);
  png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  if (!ok) throw Error(std::string("PNG: ") + state.message);
  return raster;
}

bool encode_png_rows(png_structp png, png_infop info, const Raster* raster) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_IHDR(png, info, static_cast<png_uint_32>(raster->width()),
               static_cast<png_uint_32>(raster->height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const auto bytes = raster->bytes();
  const std::size_t stride = static_cast<std::size_t>(raster->width()) * 3;
  for (int y = 0; y < raster->height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(bytes.data() + y * stride));
  }
  png_write_end(png, nullptr);
  return true;
}

Raster decode_ppm(std::span<const std::uint8_t> data) {
  std::string text(data.begin(), data.end());
  std::istringstream in(text);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  auto skip_comments = [&] {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string ignored;
      std::getline(in, ignored);
      in >> std::ws;
    }
  };
  in >> magic;
  skip_comments();
  in >> w;
  skip_comments();
  in >> h;
  skip_comments();
  in >> maxval;
  if (!in || magic != "P6" || w <= 0 || h <= 0 || maxval != 255) {
    throw Error("PPM: only 8-bit binary P6 is supported");
  }
  in.get();
  const std::size_t offset = static_cast<std::size_t>(in.tellg());
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (data.size() < offset + need) throw Error("PPM: truncated pixel data");
  Raster raster(w, h);
  const std::uint8_t* p = data.data() + offset;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, p += 3) raster.set(x, y, {p[0], p[1], p[2]});
  }
  return raster;
}

}  // namespace

Raster::Raster(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error("negative raster size");
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

void Raster::fill_rect(int x, int y, int w, int h, Rgb c) {
  const int x0 = std::max(0, x), y0 = std::max(0, y);
  const int x1 = std::min(width_, x + w), y1 = std::min(height_, y + h);
  for (int yy = y0; yy < y1; ++yy) {
    for (int xx = x0; xx < x1; ++xx) set(xx, yy, c);
  }
}

Raster decode_image(std::span<const std::uint8_t> data) {
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P',  'N',  'G',
                                             '\r', '\n', 0x1a, '\n'};
  if (data.size() >= 8 && std::equal(kPngSig, kPngSig + 8, data.begin())) {
    return decode_png(data);
  }
  if (data.size() >= 2 && data[0] == 'P' && data[1] == '6') {
    return decode_ppm(data);
  }
  throw Error("undecodable image: expected PNG or binary PPM");
}

Raster read_image(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return decode_image(std::span(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::vector<std::uint8_t> encode_png(const Raster& raster) {
  if (raster.empty()) throw Error("cannot encode an empty raster");
  PngErrorState state;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state,
                                            png_error_to_state, png_warn_ignore);
  if (!png) throw Error("PNG: cannot allocate encoder");
  png_infop info = png_create_info_struct(png);
  std::vector<std::uint8_t> out;
  png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
  const bool ok = info && encode_png_rows(png, info, &raster);
  png_destroy_write_struct(&png, info ? &info : nullptr);
  if (!ok) throw Error(std::string("PNG: ") + state.message);
  return out;
}

void write_png(const std::filesystem::path& path, const Raster& raster) {
  const auto png = encode_png(raster);
  write_file_atomic(path, std::string(png.begin(), png.end()));
}

}  // namespace axsynth
