#include "aoa/pgm.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aoa::raster {

namespace {

constexpr const char* kGridTag = " aoa-grid";

[[noreturn]] void format_error(std::size_t offset, const std::string& what) {
  throw Error(ErrorKind::kFormat, "PGM: " + what + " at byte offset " + std::to_string(offset));
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, PgmImage& out) : bytes_(bytes), out_(out) {}

  // Skips whitespace and comments, then reads a decimal field.
  int next_int(const char* field) {
    skip();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') ++pos_;
    if (start == pos_) format_error(start, std::string("expected ") + field);
    int value = 0;
    const auto res = std::from_chars(bytes_.data() + start, bytes_.data() + pos_, value);
    if (res.ec != std::errc()) format_error(start, std::string(field) + " out of range");
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        const std::size_t eol = bytes_.find('\n', pos_);
        if (eol == std::string::npos) format_error(pos_, "unterminated comment");
        std::string text = bytes_.substr(pos_ + 1, eol - pos_ - 1);
        if (!text.empty() && text.back() == '\r') text.pop_back();
        out_.comments.push_back(std::move(text));
        pos_ = eol + 1;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  PgmImage& out_;
  std::size_t pos_ = 0;
};

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::uint16_t quantize(double v, int maxval) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(clamped * maxval));
}

PgmImage blank(int width, int height, int maxval, const GridSpec& g) {
  PgmImage p;
  p.width = width;
  p.height = height;
  p.maxval = maxval;
  p.comments = {grid_comment(g)};
  p.samples.resize(static_cast<std::size_t>(width) * height);
  return p;
}

}  // namespace

std::string encode_pgm(const PgmImage& img) {
  if (img.width <= 0 || img.height <= 0) throw Error(ErrorKind::kInvalidArgument, "PGM needs a positive size");
  if (img.maxval < 1 || img.maxval > 65535) throw Error(ErrorKind::kInvalidArgument, "PGM maxval must be in [1, 65535]");
  if (img.samples.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw Error(ErrorKind::kInvalidArgument, "PGM sample count does not match its size");
  }
  std::string out = "P5\n";
  for (const auto& c : img.comments) {
    if (c.find('\n') != std::string::npos) throw Error(ErrorKind::kInvalidArgument, "PGM comment contains a newline");
    out += "#" + c + "\n";
  }
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n" + std::to_string(img.maxval) + "\n";
  const bool wide = img.maxval > 255;
  out.reserve(out.size() + img.samples.size() * (wide ? 2 : 1));
  for (const std::uint16_t s : img.samples) {
    if (s > img.maxval) throw Error(ErrorKind::kInvalidArgument, "PGM sample exceeds maxval");
    if (wide) out.push_back(static_cast<char>(s >> 8));
    out.push_back(static_cast<char>(s & 0xff));
  }
  return out;
}

PgmImage decode_pgm(const std::string& bytes) {
  PgmImage img;
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') format_error(0, "missing P5 magic");
  HeaderReader reader(bytes, img);
  reader.advance(2);
  if (reader.pos() >= bytes.size() || !is_space(bytes[reader.pos()])) format_error(2, "expected whitespace after magic");
  img.width = reader.next_int("width");
  img.height = reader.next_int("height");
  const std::size_t maxval_at = reader.pos();
  img.maxval = reader.next_int("maxval");
  if (img.width <= 0 || img.height <= 0) format_error(maxval_at, "non-positive image size");
  if (img.maxval < 1 || img.maxval > 65535) format_error(maxval_at, "maxval outside [1, 65535]");
  if (reader.pos() >= bytes.size() || !is_space(bytes[reader.pos()])) {
    format_error(reader.pos(), "expected single whitespace before raster");
  }
  reader.advance(1);

  const std::size_t data_at = reader.pos();
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  const std::size_t bps = img.maxval > 255 ? 2 : 1;
  const std::size_t need = count * bps;
  if (bytes.size() - data_at < need) {
    format_error(bytes.size(), "raster truncated (expected " + std::to_string(need) + " bytes from offset " +
                                   std::to_string(data_at) + ")");
  }
  if (bytes.size() - data_at > need) format_error(data_at + need, "trailing bytes after raster");

  img.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = data_at + i * bps;
    std::uint16_t v = static_cast<unsigned char>(bytes[at]);
    if (bps == 2) v = static_cast<std::uint16_t>((v << 8) | static_cast<unsigned char>(bytes[at + 1]));
    if (v > img.maxval) format_error(at, "sample " + std::to_string(v) + " exceeds maxval");
    img.samples[i] = v;
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const PgmImage& img) {
  const std::string bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_pgm(buf.str());
}

std::string grid_comment(const GridSpec& g) {
  return std::string(kGridTag) + " x_min=" + format_double(g.region.x_min) +
         " x_max=" + format_double(g.region.x_max) + " y_min=" + format_double(g.region.y_min) +
         " y_max=" + format_double(g.region.y_max) + " resolution=" + format_double(g.resolution) +
         " width=" + std::to_string(g.width) + " height=" + std::to_string(g.height) + " row_order=north-up";
}

std::optional<GridSpec> parse_grid_comment(const std::string& comment) {
  if (comment.rfind(kGridTag, 0) != 0) return std::nullopt;
  std::istringstream in(comment.substr(std::string(kGridTag).size()));
  GridSpec g;
  bool seen[7] = {};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kFormat, "grid comment token '" + token + "' has no '='");
    const std::string key = token.substr(0, eq);
    const std::string val = token.substr(eq + 1);
    const auto num = [&](auto& dst, int slot) {
      const auto res = std::from_chars(val.data(), val.data() + val.size(), dst);
      if (res.ec != std::errc() || res.ptr != val.data() + val.size()) {
        throw Error(ErrorKind::kFormat, "grid comment: bad value for " + key);
      }
      seen[slot] = true;
    };
    if (key == "x_min") num(g.region.x_min, 0);
    else if (key == "x_max") num(g.region.x_max, 1);
    else if (key == "y_min") num(g.region.y_min, 2);
    else if (key == "y_max") num(g.region.y_max, 3);
    else if (key == "resolution") num(g.resolution, 4);
    else if (key == "width") num(g.width, 5);
    else if (key == "height") num(g.height, 6);
    else if (key == "row_order") {
      if (val != "north-up") throw Error(ErrorKind::kFormat, "unsupported row_order '" + val + "'");
    }
  }
  if (!std::all_of(std::begin(seen), std::begin(seen) + 5, [](bool b) { return b; })) {
    throw Error(ErrorKind::kFormat, "grid comment is missing fields");
  }
  const GridSpec derived = GridSpec::from_region(g.region, g.resolution);
  if ((seen[5] && g.width != derived.width) || (seen[6] && g.height != derived.height)) {
    throw Error(ErrorKind::kFormat, "grid comment size disagrees with region / resolution");
  }
  return derived;
}

std::optional<GridSpec> find_grid(const PgmImage& img) {
  for (const auto& c : img.comments) {
    if (auto g = parse_grid_comment(c)) return g;
  }
  return std::nullopt;
}

PgmImage input_to_pgm(const InputImage& img, const GridSpec& g) {
  PgmImage p = blank(img.width, img.height, 255, g);
  std::transform(img.data.begin(), img.data.end(), p.samples.begin(), [](float v) { return quantize(v, 255); });
  return p;
}

PgmImage label_to_pgm(const LabelImage& img, const GridSpec& g) {
  PgmImage p = blank(img.width, img.height, 255, g);
  std::transform(img.data.begin(), img.data.end(), p.samples.begin(),
                 [](std::uint8_t v) { return static_cast<std::uint16_t>(v ? 255 : 0); });
  return p;
}

PgmImage probability_to_pgm(const Image<double>& probs, const GridSpec& g) {
  PgmImage p = blank(probs.width, probs.height, 65535, g);
  std::transform(probs.data.begin(), probs.data.end(), p.samples.begin(),
                 [](double v) { return quantize(v, 65535); });
  return p;
}

}  // namespace aoa::raster
