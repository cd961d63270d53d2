#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fasbeam/errors.hpp"
#include "fasbeam/model_io.hpp"
#include "test_util.hpp"

using namespace fasbeam;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fasbeam_test_" + name);
}

void expect_same(const GnnParams& a, const GnnParams& b) {
  ASSERT_EQ(a.layers.size(), b.layers.size());
  EXPECT_EQ(a.cell, b.cell);
  const auto ta = a.tensors(), tb = b.tensors();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    ASSERT_EQ(ta[i].shape(), tb[i].shape());
    EXPECT_TRUE(std::equal(ta[i].data().begin(), ta[i].data().end(), tb[i].data().begin()));
  }
}

}  // namespace

TEST(ModelIo, RoundTripBitExact) {
  const GnnDims d = GnnDims::desk(4);
  GnnParams p = testutil::random_params(d, 3);
  p.cell = 1;
  const auto path = temp_file("roundtrip.fbgn");
  save_params(p, path);
  expect_same(p, load_params(path, d));
  EXPECT_EQ(std::filesystem::file_size(path), model_file_size(d));
}

TEST(ModelIo, FileSizeFromParameterCount) {
  const GnnDims d = GnnDims::desk(4);
  // 10-byte header, 22 tensor shapes of 8 bytes, values, 4-byte CRC.
  EXPECT_EQ(model_file_size(d), 10 + 22 * 8 + d.parameter_count() * 8 + 4);
  EXPECT_EQ(encode_params(GnnParams::init(d, 0, 1)).size(), model_file_size(d));
}

TEST(ModelIo, CorruptMagicRejected) {
  const GnnDims d = GnnDims::desk(2);
  auto bytes = encode_params(GnnParams::init(d, 0, 1));
  bytes[0] = 'X';
  EXPECT_THROW(decode_params(bytes, d), ModelFormatError);
}

TEST(ModelIo, VersionMismatchRejected) {
  const GnnDims d = GnnDims::desk(2);
  auto bytes = encode_params(GnnParams::init(d, 0, 1));
  bytes[4] = 9;
  try {
    decode_params(bytes, d);
    FAIL();
  } catch (const ModelFormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
}

TEST(ModelIo, TruncationRejected) {
  const GnnDims d = GnnDims::desk(2);
  const auto bytes = encode_params(GnnParams::init(d, 0, 1));
  for (std::size_t keep : {std::size_t{0}, std::size_t{7}, std::size_t{30}, bytes.size() / 2,
                           bytes.size() - 1}) {
    const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + static_cast<long>(keep));
    EXPECT_THROW(decode_params(cut, d), ModelFormatError) << keep;
  }
}

TEST(ModelIo, PayloadCorruptionFailsCrc) {
  const GnnDims d = GnnDims::desk(2);
  auto bytes = encode_params(GnnParams::init(d, 0, 1));
  bytes[bytes.size() / 2] ^= 0x10;
  EXPECT_THROW(decode_params(bytes, d), ModelFormatError);
}

TEST(ModelIo, ShapeMismatchRejected) {
  const auto bytes = encode_params(GnnParams::init(GnnDims::desk(4), 0, 1));
  EXPECT_THROW(decode_params(bytes, GnnDims::desk(2)), ModelFormatError);
  EXPECT_THROW(decode_params(bytes, GnnDims::scaled(4, 64, 16)), ModelFormatError);
}

TEST(ModelIo, MissingFileIsInputError) {
  EXPECT_THROW(load_params(temp_file("does_not_exist.fbgn"), GnnDims::desk(4)), InputError);
}
