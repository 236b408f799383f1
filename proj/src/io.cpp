#include "vgpnn/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <regex>

#include "vgpnn/error.hpp"

namespace vgpnn {

namespace fs = std::filesystem;

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d.png", index);
  return buf;
}

namespace {

struct Frame {
  int w = 0, h = 0;
  std::vector<std::uint8_t> rgb;
};

Frame read_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw DataError("read_video: cannot decode " + path.string() + ": " + image.message);
  const bool rgb8 = (image.format & PNG_FORMAT_FLAG_COLOR) && !(image.format & PNG_FORMAT_FLAG_ALPHA) &&
                    !(image.format & PNG_FORMAT_FLAG_LINEAR);
  if (!rgb8) {
    png_image_free(&image);
    throw DataError("read_video: " + path.string() + " is not an 8-bit RGB image");
  }
  image.format = PNG_FORMAT_RGB;
  Frame f;
  f.w = static_cast<int>(image.width);
  f.h = static_cast<int>(image.height);
  f.rgb.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, f.rgb.data(), 0, nullptr))
    throw DataError("read_video: cannot decode " + path.string() + ": " + image.message);
  return f;
}

void write_png(const fs::path& path, int w, int h, const std::uint8_t* rgb) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  const fs::path tmp = path.string() + ".tmp";
  if (!png_image_write_to_file(&image, tmp.c_str(), 0, rgb, 0, nullptr))
    throw DataError("write_video: cannot write " + path.string() + ": " + image.message);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("write_video: cannot rename into " + path.string() + ": " + ec.message());
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

VideoTensor read_video(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DataError("read_video: " + dir.string() + " is not a directory");
  static const std::regex pattern(R"(frame_(\d{6})\.png)");
  std::map<int, fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) frames.emplace(std::stoi(m[1].str()), entry.path());
  }
  if (frames.empty()) throw DataError("read_video: no frame_%06d.png files in " + dir.string());
  int expected = 0;
  for (const auto& [index, path] : frames) {
    if (index != expected) throw DataError("read_video: missing frame " + frame_name(expected) + " in " + dir.string());
    ++expected;
  }

  const int t = static_cast<int>(frames.size());
  VideoTensor v;
  int f = 0;
  for (const auto& [index, path] : frames) {
    Frame img = read_png(path);
    if (f == 0) {
      v = VideoTensor(t, img.h, img.w, 3);
    } else if (img.w != v.w() || img.h != v.h()) {
      throw DataError("read_video: " + path.filename().string() + " is " + std::to_string(img.w) + "x" +
                      std::to_string(img.h) + ", expected " + std::to_string(v.w()) + "x" + std::to_string(v.h()));
    }
    float* dst = v.data().data() + v.index(f, 0, 0);
    for (std::size_t i = 0; i < img.rgb.size(); ++i) dst[i] = static_cast<float>(img.rgb[i] / 127.5 - 1.0);
    ++f;
  }
  return v;
}

void write_video(const VideoTensor& v, const fs::path& dir) {
  if (v.c() != 3) throw DataError("write_video: expected 3 channels, got " + std::to_string(v.c()));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw DataError("write_video: cannot create " + dir.string());
  const std::size_t frame = static_cast<std::size_t>(v.h()) * v.w() * 3;
  std::vector<std::uint8_t> rgb(frame);
  for (int t = 0; t < v.t(); ++t) {
    const float* src = v.frame_ptr(t);
    for (std::size_t i = 0; i < frame; ++i) {
      const double x = std::clamp(static_cast<double>(src[i]), -1.0, 1.0);
      rgb[i] = static_cast<std::uint8_t>(std::round((x + 1.0) * 127.5));
    }
    write_png(dir / frame_name(t), v.w(), v.h(), rgb.data());
  }
}

std::vector<std::uint8_t> encode_vgt(const VideoTensor& v) {
  std::vector<std::uint8_t> out{'V', 'G', 'T', '1'};
  out.reserve(20 + 4 * v.size());
  for (int d : {v.t(), v.h(), v.w(), v.c()}) put_u32(out, static_cast<std::uint32_t>(d));
  for (float x : v.data()) put_u32(out, std::bit_cast<std::uint32_t>(x));
  return out;
}

VideoTensor decode_vgt(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 20 || std::memcmp(bytes.data(), "VGT1", 4) != 0)
    throw DataError("vgt: missing VGT1 header");
  std::uint32_t dims[4];
  for (int i = 0; i < 4; ++i) {
    dims[i] = get_u32(bytes.data() + 4 + 4 * i);
    if (dims[i] == 0 || dims[i] > (1u << 30)) throw DataError("vgt: invalid dimension in header");
  }
  const unsigned long long count = 1ull * dims[0] * dims[1] * dims[2] * dims[3];
  if (bytes.size() != 20 + 4 * count)
    throw DataError("vgt: file size " + std::to_string(bytes.size()) + " does not match header (expected " +
                    std::to_string(20 + 4 * count) + ")");
  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = std::bit_cast<float>(get_u32(bytes.data() + 20 + 4 * i));
  for (float x : data)
    if (!std::isfinite(x)) throw DataError("vgt: non-finite value");
  return VideoTensor(Shape3{static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2])},
                     static_cast<int>(dims[3]), std::move(data));
}

VideoTensor read_vgt(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("vgt: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_vgt(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_vgt(const VideoTensor& v, const fs::path& path) {
  const auto bytes = encode_vgt(v);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("vgt: cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("vgt: cannot write " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("vgt: cannot rename into " + path.string() + ": " + ec.message());
}

std::vector<std::pair<std::string, std::string>> parse_config(std::string_view text) {
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string_view{};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  std::vector<std::pair<std::string, std::string>> out;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value, got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    if (value.empty()) throw UsageError("config key '" + key + "' (line " + std::to_string(line_no) + "): empty value");
    out.emplace_back(key, value);
  }
  return out;
}

}  // namespace vgpnn
