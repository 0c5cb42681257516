#include "ngfreg/io/cache.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <limits>

#include "binary.hpp"
#include "ngfreg/errors.hpp"
#include "ngfreg/io/image_io.hpp"

namespace ngfreg::io {

namespace {

constexpr std::array<char, 8> kMagic{'N', 'G', 'F', 'P', 'Y', 'R', '0', '1'};

}  // namespace

PyramidCache make_cache(const Image& preprocessed) {
  ImagePyramid pyr = build_pyramid(preprocessed, std::numeric_limits<int>::max(),
                                   std::max({preprocessed.width, preprocessed.height, 2}));
  PyramidCache c;
  c.levels.assign(std::make_move_iterator(pyr.levels.rbegin()),
                  std::make_move_iterator(pyr.levels.rend()));
  return c;
}

void write_cache(const std::filesystem::path& path, const PyramidCache& cache) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  const std::uint32_t flags = (cache.grayscaled ? 1u : 0u) | (cache.inverted ? 2u : 0u);
  detail::put<std::uint32_t>(out, flags);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(cache.levels.size()));
  for (const Image& img : cache.levels) {
    if (img.data.size() != static_cast<std::size_t>(img.width) * img.height)
      throw InvalidInput("cache level size mismatch");
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(img.width));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(img.height));
    detail::put<double>(out, img.spacing);
    detail::put<double>(out, img.origin.x);
    detail::put<double>(out, img.origin.y);
  }
  for (const Image& img : cache.levels) {
    if constexpr (std::endian::native == std::endian::little) {
      out.write(reinterpret_cast<const char*>(img.data.data()),
                static_cast<std::streamsize>(img.data.size() * sizeof(float)));
    } else {
      for (float v : img.data) detail::put<float>(out, v);
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

bool is_cache_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<char, 8> magic{};
  return in.read(magic.data(), magic.size()) && magic == kMagic;
}

PyramidCache read_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  const auto file_size = std::filesystem::file_size(path);
  try {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
      throw FormatError("not a pyramid cache");
    PyramidCache c;
    const auto flags = detail::get<std::uint32_t>(in);
    c.grayscaled = flags & 1u;
    c.inverted = flags & 2u;
    const auto n = detail::get<std::uint32_t>(in);
    std::uintmax_t expected = 8 + 8 + static_cast<std::uintmax_t>(n) * 32;
    if (expected > file_size) throw FormatError("header larger than file");
    for (std::uint32_t l = 0; l < n; ++l) {
      const auto w = detail::get<std::uint32_t>(in);
      const auto h = detail::get<std::uint32_t>(in);
      const double s = detail::get<double>(in);
      const double ox = detail::get<double>(in);
      const double oy = detail::get<double>(in);
      if (w == 0 || h == 0) throw FormatError("level with zero size");
      expected += static_cast<std::uintmax_t>(w) * h * sizeof(float);
      if (expected > file_size) throw FormatError("payload larger than file");
      Image img;
      img.width = static_cast<int>(w);
      img.height = static_cast<int>(h);
      img.spacing = s;
      img.origin = {ox, oy};
      c.levels.push_back(std::move(img));
    }
    if (expected != file_size) throw FormatError("file size does not match header");
    for (Image& img : c.levels) {
      img.data.resize(static_cast<std::size_t>(img.width) * img.height);
      if constexpr (std::endian::native == std::endian::little) {
        if (!in.read(reinterpret_cast<char*>(img.data.data()),
                     static_cast<std::streamsize>(img.data.size() * sizeof(float))))
          throw FormatError("unexpected end of file");
      } else {
        for (float& v : img.data) v = detail::get<float>(in);
      }
    }
    return c;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

PyramidCache cache_convert(const std::filesystem::path& input, const std::filesystem::path& output) {
  PyramidCache c = make_cache(preprocess(read_raw_image(input)));
  write_cache(output, c);
  return c;
}

}  // namespace ngfreg::io
