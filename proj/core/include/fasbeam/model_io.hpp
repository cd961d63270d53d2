#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fasbeam/gnn.hpp"

namespace fasbeam {

inline constexpr std::uint16_t kModelFormatVersion = 1;

// Little-endian layout: "FBGN", u16 version, u16 cell, u16 tensor count, then
// per tensor u32 rows, u32 cols and rows*cols doubles, then the CRC32 of every
// preceding byte.
std::vector<std::uint8_t> encode_params(const GnnParams& params);
// `expected` is checked against the shapes stored in the file.
GnnParams decode_params(const std::vector<std::uint8_t>& bytes, const GnnDims& expected);

void save_params(const GnnParams& params, const std::filesystem::path& path);
// Throws ModelFormatError on bad magic, version, truncation, CRC or shape
// mismatch, and InputError if the file cannot be read.
GnnParams load_params(const std::filesystem::path& path, const GnnDims& expected);

// Byte size of the file written for `dims`.
std::size_t model_file_size(const GnnDims& dims);

}  // namespace fasbeam
