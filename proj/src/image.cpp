#include "xens/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "xens/digest.hpp"
#include "xens/error.hpp"

#ifdef XENS_WITH_OPENCV
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#endif

namespace xens {

namespace {

// PNM header token reader: skips whitespace and '#' comments.
bool next_pnm_token(const std::string& bytes, std::size_t& pos, std::string& tok) {
  while (pos < bytes.size()) {
    char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size()) return false;
  std::size_t start = pos;
  while (pos < bytes.size() &&
         !std::isspace(static_cast<unsigned char>(bytes[pos])))
    ++pos;
  tok = bytes.substr(start, pos - start);
  return true;
}

Image decode_pnm(const std::string& bytes) {
  std::size_t pos = 0;
  std::string tok;
  if (!next_pnm_token(bytes, pos, tok)) return {};
  const std::string magic = tok;
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6")
    return {};
  const bool binary = (magic == "P5" || magic == "P6");
  const int channels = (magic == "P3" || magic == "P6") ? 3 : 1;

  long w = 0, h = 0, maxval = 0;
  auto read_int = [&](long& out) {
    if (!next_pnm_token(bytes, pos, tok)) return false;
    char* end = nullptr;
    out = std::strtol(tok.c_str(), &end, 10);
    return end != tok.c_str() && *end == '\0' && out >= 0;
  };
  if (!read_int(w) || !read_int(h) || !read_int(maxval)) return {};
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) return {};

  const std::size_t count = static_cast<std::size_t>(w) * h * channels;
  std::vector<float> raw(count);
  if (binary) {
    ++pos;  // single whitespace after maxval
    const int bytes_per = maxval > 255 ? 2 : 1;
    if (bytes.size() - pos < count * bytes_per) return {};
    const unsigned char* p =
        reinterpret_cast<const unsigned char*>(bytes.data()) + pos;
    for (std::size_t i = 0; i < count; ++i) {
      unsigned v = bytes_per == 2 ? (unsigned(p[2 * i]) << 8) | p[2 * i + 1]
                                  : p[i];
      raw[i] = static_cast<float>(v) / static_cast<float>(maxval);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      long v;
      if (!read_int(v) || v > maxval) return {};
      raw[i] = static_cast<float>(v) / static_cast<float>(maxval);
    }
  }

  Image img(static_cast<int>(w), static_cast<int>(h));
  if (channels == 1) {
    img.pixels.assign(raw.begin(), raw.end());
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      // ITU-R BT.601 luma
      img.pixels[i] = 0.299f * raw[3 * i] + 0.587f * raw[3 * i + 1] +
                      0.114f * raw[3 * i + 2];
    }
  }
  return img;
}

}  // namespace

Image decode_image(const std::string& bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '2' && bytes[1] <= '6') {
    Image img = decode_pnm(bytes);
    if (!img.empty()) return img;
  }
#ifdef XENS_WITH_OPENCV
  cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8U,
              const_cast<char*>(bytes.data()));
  cv::Mat mat = cv::imdecode(buf, cv::IMREAD_GRAYSCALE);
  if (!mat.empty()) {
    Image img(mat.cols, mat.rows);
    for (int y = 0; y < mat.rows; ++y) {
      const unsigned char* row = mat.ptr<unsigned char>(y);
      for (int x = 0; x < mat.cols; ++x)
        img.at(y, x) = static_cast<float>(row[x]) / 255.0f;
    }
    return img;
  }
#endif
  return {};
}

Image load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return decode_image(bytes);
}

std::string encode_pgm(const Image& img) {
  std::ostringstream os;
  os << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::string out = os.str();
  out.reserve(out.size() + img.pixels.size());
  for (float v : img.pixels) {
    float c = std::clamp(v, 0.0f, 1.0f);
    out.push_back(static_cast<char>(
        static_cast<unsigned char>(std::lround(c * 255.0f))));
  }
  return out;
}

void save_pgm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write image: ", path);
  std::string bytes = encode_pgm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail("write failed: ", path);
}

Image resize_bilinear(const Image& img, int out_w, int out_h) {
  require(!img.empty(), "resize of empty image");
  require(out_w >= 1 && out_h >= 1, "resize target must be >= 1x1");
  if (out_w == img.width && out_h == img.height) return img;

  Image out(out_w, out_h);
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y0c = std::clamp(y0, 0, img.height - 1);
    int y1c = std::clamp(y0 + 1, 0, img.height - 1);
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x0c = std::clamp(x0, 0, img.width - 1);
      int x1c = std::clamp(x0 + 1, 0, img.width - 1);
      double top = img.at(y0c, x0c) * (1.0 - wx) + img.at(y0c, x1c) * wx;
      double bot = img.at(y1c, x0c) * (1.0 - wx) + img.at(y1c, x1c) * wx;
      out.at(y, x) = static_cast<float>(top * (1.0 - wy) + bot * wy);
    }
  }
  return out;
}

Image rotate_bilinear(const Image& img, double degrees) {
  require(!img.empty(), "rotate of empty image");
  if (degrees == 0.0) return img;

  const double rad = degrees * 3.14159265358979323846 / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = (img.width - 1) * 0.5, cy = (img.height - 1) * 0.5;
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      // inverse map: rotate destination back into source coordinates
      double dx = x - cx, dy = y - cy;
      double sxf = c * dx + s * dy + cx;
      double syf = -s * dx + c * dy + cy;
      int x0 = static_cast<int>(std::floor(sxf));
      int y0 = static_cast<int>(std::floor(syf));
      double wx = sxf - x0, wy = syf - y0;
      int x0c = std::clamp(x0, 0, img.width - 1);
      int x1c = std::clamp(x0 + 1, 0, img.width - 1);
      int y0c = std::clamp(y0, 0, img.height - 1);
      int y1c = std::clamp(y0 + 1, 0, img.height - 1);
      double top = img.at(y0c, x0c) * (1.0 - wx) + img.at(y0c, x1c) * wx;
      double bot = img.at(y1c, x0c) * (1.0 - wx) + img.at(y1c, x1c) * wx;
      out.at(y, x) = static_cast<float>(top * (1.0 - wy) + bot * wy);
    }
  }
  return out;
}

Image crop(const Image& img, int x0, int y0, int w, int h) {
  require(x0 >= 0 && y0 >= 0 && w >= 1 && h >= 1 && x0 + w <= img.width &&
              y0 + h <= img.height,
          "crop rectangle out of bounds");
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(y, x) = img.at(y0 + y, x0 + x);
  return out;
}

Image hflip(const Image& img) {
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.at(y, x) = img.at(y, img.width - 1 - x);
  return out;
}

}  // namespace xens
