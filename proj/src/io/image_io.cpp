#include "ngfreg/io/image_io.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "ngfreg/errors.hpp"
#include "ngfreg/io/cache.hpp"

namespace ngfreg::io {

RawImage read_raw_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("file not found: " + path.string());
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
  if (m.empty()) throw IoError("cannot decode image: " + path.string());

  RawImage raw;
  raw.width = m.cols;
  raw.height = m.rows;
  raw.channels = m.channels();
  switch (m.depth()) {
    case CV_8U: raw.max_value = 255.0; break;
    case CV_16U: raw.max_value = 65535.0; break;
    case CV_32F:
    case CV_64F: raw.max_value = 1.0; break;
    default: throw IoError("unsupported pixel depth in " + path.string());
  }
  cv::Mat f;
  m.convertTo(f, CV_MAKETYPE(CV_32F, raw.channels));
  if (raw.max_value == 1.0) cv::min(cv::max(f, 0.0), 1.0, f);
  raw.samples.resize(static_cast<std::size_t>(raw.width) * raw.height * raw.channels);
  for (int r = 0; r < raw.height; ++r) {
    const float* src = f.ptr<float>(r);
    std::copy(src, src + static_cast<std::size_t>(raw.width) * raw.channels,
              raw.samples.begin() + static_cast<std::ptrdiff_t>(r) * raw.width * raw.channels);
  }
  if (raw.channels >= 3) {
    // OpenCV decodes to BGR(A).
    for (std::size_t i = 0; i < raw.samples.size(); i += raw.channels)
      std::swap(raw.samples[i], raw.samples[i + 2]);
  }
  return raw;
}

Image load_image(const std::filesystem::path& path) {
  if (is_cache_file(path)) {
    PyramidCache c = read_cache(path);
    if (c.levels.empty()) throw FormatError("cache holds no levels: " + path.string());
    return std::move(c.levels.front());
  }
  return preprocess(read_raw_image(path));
}

void write_png(const std::filesystem::path& path, const Image& img, bool restore_contrast) {
  cv::Mat m(img.height, img.width, CV_8UC1);
  for (int r = 0; r < img.height; ++r) {
    auto* dst = m.ptr<unsigned char>(r);
    for (int c = 0; c < img.width; ++c) {
      double v = std::clamp(static_cast<double>(img.at(r, c)), 0.0, 1.0);
      if (restore_contrast) v = 1.0 - v;
      dst[c] = static_cast<unsigned char>(std::lround(255.0 * v));
    }
  }
  if (!cv::imwrite(path.string(), m)) throw IoError("cannot write image: " + path.string());
}

void write_raw_png(const std::filesystem::path& path, const RawImage& raw) {
  if (raw.channels != 1 && raw.channels != 3) throw InvalidInput("write_raw_png supports 1 or 3 channels");
  cv::Mat m(raw.height, raw.width, CV_MAKETYPE(CV_8U, raw.channels));
  const double s = 255.0 / raw.max_value;
  for (int r = 0; r < raw.height; ++r) {
    auto* dst = m.ptr<unsigned char>(r);
    for (int i = 0; i < raw.width * raw.channels; ++i) {
      // RGB to BGR for OpenCV.
      int src = i;
      if (raw.channels == 3 && i % 3 != 1) src = i % 3 == 0 ? i + 2 : i - 2;
      const double v = raw.samples[static_cast<std::size_t>(r) * raw.width * raw.channels + src] * s;
      dst[i] = static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  if (!cv::imwrite(path.string(), m)) throw IoError("cannot write image: " + path.string());
}

}  // namespace ngfreg::io
