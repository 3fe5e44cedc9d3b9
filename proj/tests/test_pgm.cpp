#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "aoa/pgm.hpp"
#include "support.hpp"

namespace aoa::raster {
namespace {

PgmImage tiny(int maxval) {
  PgmImage p;
  p.width = 3;
  p.height = 2;
  p.maxval = maxval;
  p.samples = {0, 1, 2, 3, 4, static_cast<std::uint16_t>(maxval)};
  return p;
}

std::string format_error_message(const std::string& bytes) {
  try {
    decode_pgm(bytes);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    return e.what();
  }
  ADD_FAILURE() << "expected a format error";
  return {};
}

TEST(Pgm, EightBitLayout) {
  PgmImage p = tiny(255);
  p.comments = {" hello"};
  const std::string bytes = encode_pgm(p);
  EXPECT_EQ(bytes, std::string("P5\n# hello\n3 2\n255\n") + std::string("\x00\x01\x02\x03\x04\xff", 6));
  EXPECT_EQ(decode_pgm(bytes).samples, p.samples);
  EXPECT_EQ(decode_pgm(bytes).comments, p.comments);
}

TEST(Pgm, SixteenBitIsBigEndian) {
  PgmImage p;
  p.width = 2;
  p.height = 1;
  p.maxval = 65535;
  p.samples = {0x1234, 0xfffe};
  const std::string bytes = encode_pgm(p);
  EXPECT_EQ(bytes.substr(bytes.size() - 4), std::string("\x12\x34\xff\xfe", 4));
  EXPECT_EQ(decode_pgm(bytes).samples, p.samples);
}

TEST(Pgm, RandomImagesRoundTripByteExact) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    PgmImage p;
    p.width = 1 + static_cast<int>(rng() % 40);
    p.height = 1 + static_cast<int>(rng() % 40);
    p.maxval = i % 2 ? 65535 : 255;
    for (int k = 0; k < p.width * p.height; ++k) p.samples.push_back(static_cast<std::uint16_t>(rng() % (p.maxval + 1)));
    const std::string bytes = encode_pgm(p);
    EXPECT_EQ(encode_pgm(decode_pgm(bytes)), bytes);
  }
}

TEST(Pgm, ForeignHeaderWhitespaceAccepted) {
  const std::string bytes = std::string("P5 #c1\n 2\t1 #c2\n255\n") + std::string("\x07\x08", 2);
  const PgmImage p = decode_pgm(bytes);
  EXPECT_EQ(p.width, 2);
  EXPECT_EQ(p.samples, (std::vector<std::uint16_t>{7, 8}));
  EXPECT_EQ(p.comments.size(), 2u);
}

TEST(Pgm, ErrorsNameByteOffset) {
  EXPECT_NE(format_error_message("P6\n1 1\n255\n\x01").find("offset 0"), std::string::npos);
  EXPECT_NE(format_error_message("P5\nx 1\n255\n").find("offset 3"), std::string::npos);
  const std::string truncated = "P5\n2 2\n255\n\x01\x02";
  EXPECT_NE(format_error_message(truncated).find("offset 13"), std::string::npos);
  const std::string trailing = std::string("P5\n1 1\n255\n\x01\x02", 13);
  EXPECT_NE(format_error_message(trailing).find("offset 12"), std::string::npos);
  const std::string over = std::string("P5\n1 1\n100\n\xc8", 12);
  EXPECT_NE(format_error_message(over).find("offset 11"), std::string::npos);
  format_error_message("P5\n1 1\n0\n\x00");
  format_error_message("");
}

TEST(Pgm, EncodeRejectsInconsistentImages) {
  PgmImage p = tiny(255);
  p.samples.pop_back();
  EXPECT_THROW(encode_pgm(p), Error);
  p = tiny(255);
  p.samples[0] = 300;
  EXPECT_THROW(encode_pgm(p), Error);
  p = tiny(255);
  p.comments = {"a\nb"};
  EXPECT_THROW(encode_pgm(p), Error);
}

TEST(GridComment, RoundTripsBitExactly) {
  GridSpec g = GridSpec::from_region(Region{-16000.0, 16000.0, -16000.0, 16000.0}, 250.0);
  const std::string c = grid_comment(g);
  EXPECT_EQ(c, " aoa-grid x_min=-16000 x_max=16000 y_min=-16000 y_max=16000 resolution=250 width=128 "
               "height=128 row_order=north-up");
  EXPECT_EQ(parse_grid_comment(c), g);

  const Region odd{-125.5, 1124.5, 0.375, 500.375};
  const GridSpec h = GridSpec::from_region(odd, 250.0);
  EXPECT_EQ(parse_grid_comment(grid_comment(h)), h);
  EXPECT_FALSE(parse_grid_comment(" something else").has_value());
  EXPECT_THROW(parse_grid_comment(" aoa-grid x_min=1"), Error);
  EXPECT_THROW(parse_grid_comment(" aoa-grid x_min=-16000 x_max=16000 y_min=-16000 y_max=16000 resolution=250 "
                                  "width=3 height=128"),
               Error);
}

TEST(ImageConversion, InputLabelProbability) {
  const GridSpec g = GridSpec::from_region(Region::centered(500.0), 250.0);
  InputImage in(4, 4, 0.0f);
  in.at(1, 2) = 1.0f;
  in.at(0, 0) = 0.5f;
  const PgmImage pi = input_to_pgm(in, g);
  EXPECT_EQ(pi.maxval, 255);
  EXPECT_EQ(pi.samples[6], 255);
  EXPECT_EQ(pi.samples[0], 128);
  EXPECT_EQ(find_grid(pi), g);

  LabelImage lab(4, 4, 0);
  lab.at(3, 3) = 1;
  const PgmImage pl = label_to_pgm(lab, g);
  EXPECT_EQ(pl.samples[15], 255);
  EXPECT_EQ(pl.samples[0], 0);

  Image<double> prob(4, 4, 0.25);
  prob.at(0, 1) = 1.0;
  const PgmImage pp = probability_to_pgm(prob, g);
  EXPECT_EQ(pp.maxval, 65535);
  EXPECT_EQ(pp.samples[1], 65535);
  EXPECT_EQ(pp.samples[0], 16384);
}

TEST(PgmFile, WriteReadWriteIdentical) {
  testing::TempDir dir("pgm");
  const GridSpec g = GridSpec::from_region(Region::centered(2000.0), 250.0);
  LabelImage lab(g.width, g.height, 0);
  lab.at(4, 5) = 1;
  const PgmImage p = label_to_pgm(lab, g);
  write_pgm(dir / "a.pgm", p);
  const PgmImage q = read_pgm(dir / "a.pgm");
  write_pgm(dir / "b.pgm", q);
  std::ifstream a(dir / "a.pgm", std::ios::binary), b(dir / "b.pgm", std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);
  EXPECT_THROW(read_pgm(dir / "missing.pgm"), Error);
}

}  // namespace
}  // namespace aoa::raster
