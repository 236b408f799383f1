#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vgpnn/video.hpp"

namespace vgpnn {

// Frame directories hold frame_000000.png, frame_000001.png, ... (8-bit RGB).
std::string frame_name(int index);

// Decodes a frame directory into [-1, 1] (v / 127.5 - 1). Throws DataError on
// gaps in the numbering, size changes between frames, or non-RGB8 images.
VideoTensor read_video(const std::filesystem::path& dir);

// Clamps to [-1, 1], maps to round((v + 1) * 127.5) and writes one PNG per
// frame (temp file + rename). Requires c == 3.
void write_video(const VideoTensor& v, const std::filesystem::path& dir);

// Raw tensor file: "VGT1", u32 LE t, h, w, c, then float32 LE data (T,H,W,C).
std::vector<std::uint8_t> encode_vgt(const VideoTensor& v);
VideoTensor decode_vgt(std::span<const std::uint8_t> bytes);
VideoTensor read_vgt(const std::filesystem::path& path);
void write_vgt(const VideoTensor& v, const std::filesystem::path& path);

// key=value lines; '#' starts a comment; blank lines ignored. Throws
// UsageError naming the line (and key) on malformed input.
std::vector<std::pair<std::string, std::string>> parse_config(std::string_view text);

}  // namespace vgpnn
