#ifndef XENS_IMAGE_HPP
#define XENS_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace xens {

// Grayscale image, row-major floats in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int w, int h, float fill = 0.0f)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  float& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  float at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool empty() const { return pixels.empty(); }
};

// Decode from bytes. Handles PGM/PPM (P2/P3/P5/P6) natively; other raster
// formats (PNG/JPEG/BMP) go through OpenCV when built with it.
// Returns an empty Image if the bytes are not a decodable image.
Image decode_image(const std::string& bytes);

// Decode a file; empty Image on failure (undecodable files are the caller's
// skip-list problem, not ours).
Image load_image(const std::string& path);

// 8-bit binary PGM (P5). Deterministic bytes for identical images.
std::string encode_pgm(const Image& img);
void save_pgm(const Image& img, const std::string& path);

// Bilinear resize. out == in dimensions copies pixels exactly.
Image resize_bilinear(const Image& img, int out_w, int out_h);

// Rotate about the image center by `degrees`, bilinear sampling with
// clamp-to-edge. Output has the same dimensions.
Image rotate_bilinear(const Image& img, double degrees);

// Axis-aligned crop; the rectangle must lie inside the image.
Image crop(const Image& img, int x0, int y0, int w, int h);

Image hflip(const Image& img);

}  // namespace xens

#endif
