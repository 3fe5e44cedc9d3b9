#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aoa/raster.hpp"

namespace aoa::raster {

/// Binary graymap ("P5"). Samples are one byte when maxval < 256, otherwise
/// two bytes, most significant first.
struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::string> comments;  // text after '#', verbatim
  std::vector<std::uint16_t> samples;

  friend bool operator==(const PgmImage&, const PgmImage&) = default;
};

std::string encode_pgm(const PgmImage& img);

/// Strict parser; Error(kFormat) messages name the offending byte offset.
PgmImage decode_pgm(const std::string& bytes);

void write_pgm(const std::filesystem::path& path, const PgmImage& img);
PgmImage read_pgm(const std::filesystem::path& path);

/// One-line description of a GridSpec, bit-exact under parse_grid_comment.
std::string grid_comment(const GridSpec& g);
std::optional<GridSpec> parse_grid_comment(const std::string& comment);
/// First grid comment in the image, if any.
std::optional<GridSpec> find_grid(const PgmImage& img);

/// value -> round(value * 255), maxval 255.
PgmImage input_to_pgm(const InputImage& img, const GridSpec& g);
/// {0, 1} -> {0, 255}.
PgmImage label_to_pgm(const LabelImage& img, const GridSpec& g);
/// probability -> round(p * 65535), maxval 65535.
PgmImage probability_to_pgm(const Image<double>& probs, const GridSpec& g);

}  // namespace aoa::raster
