#include "fasbeam/model_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fasbeam/errors.hpp"

namespace fasbeam {

namespace {

constexpr char kMagic[4] = {'F', 'B', 'G', 'N'};
constexpr std::size_t kHeaderBytes = 4 + 3 * sizeof(std::uint16_t);

static_assert(std::endian::native == std::endian::little,
              "model files are written in native little-endian order");

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes, std::size_t end)
      : bytes_(bytes), end_(end) {}

  template <typename T>
  T get() {
    if (end_ - pos_ < sizeof(T)) throw ModelFormatError("model file is truncated");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t remaining() const { return end_ - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks to stay portable.
  while (n > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::size_t model_file_size(const GnnDims& dims) {
  const std::size_t tensors = 2 * dims.layer_shapes().size();
  return kHeaderBytes + tensors * 2 * sizeof(std::uint32_t) +
         dims.parameter_count() * sizeof(double) + sizeof(std::uint32_t);
}

std::vector<std::uint8_t> encode_params(const GnnParams& params) {
  std::vector<std::uint8_t> out;
  out.reserve(model_file_size(params.dims));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  const auto tensors = params.tensors();
  put<std::uint16_t>(out, kModelFormatVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(params.cell));
  put<std::uint16_t>(out, static_cast<std::uint16_t>(tensors.size()));
  for (const ad::Tensor& t : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols()));
    for (double v : t.data()) put<double>(out, v);
  }
  put<std::uint32_t>(out, crc_of(out.data(), out.size()));
  return out;
}

GnnParams decode_params(const std::vector<std::uint8_t>& bytes, const GnnDims& expected) {
  if (bytes.size() < kHeaderBytes + sizeof(std::uint32_t))
    throw ModelFormatError("model file is truncated (" + std::to_string(bytes.size()) + " bytes)");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw ModelFormatError("not a model file: bad magic bytes");

  const std::size_t body = bytes.size() - sizeof(std::uint32_t);
  Reader r(bytes, bytes.size());
  r.get<std::uint32_t>();  // magic
  const auto version = r.get<std::uint16_t>();
  if (version != kModelFormatVersion)
    throw ModelFormatError("unsupported model format version " + std::to_string(version) +
                           " (expected " + std::to_string(kModelFormatVersion) + ")");
  const auto cell = r.get<std::uint16_t>();
  const auto count = r.get<std::uint16_t>();

  const auto shapes = expected.layer_shapes();
  if (count != 2 * shapes.size())
    throw ModelFormatError("model file holds " + std::to_string(count) + " tensors, expected " +
                           std::to_string(2 * shapes.size()));

  GnnParams p;
  p.cell = cell;
  p.dims = expected;
  for (std::size_t layer = 0; layer < shapes.size(); ++layer) {
    ad::Tensor parts[2];
    const std::pair<std::size_t, std::size_t> want[2] = {shapes[layer], {1, shapes[layer].second}};
    for (int part = 0; part < 2; ++part) {
      const std::size_t rows = r.get<std::uint32_t>();
      const std::size_t cols = r.get<std::uint32_t>();
      if (rows != want[part].first || cols != want[part].second)
        throw ModelFormatError("tensor " + std::to_string(2 * layer + part) + " is " +
                               std::to_string(rows) + "x" + std::to_string(cols) +
                               ", model expects " + std::to_string(want[part].first) + "x" +
                               std::to_string(want[part].second));
      if (r.remaining() < rows * cols * sizeof(double) + sizeof(std::uint32_t))
        throw ModelFormatError("model file is truncated");
      std::vector<double> values(rows * cols);
      for (double& v : values) v = r.get<double>();
      parts[part] = ad::Tensor::from(rows, cols, std::move(values));
    }
    p.layers.push_back({parts[0], parts[1]});
  }
  if (r.remaining() != sizeof(std::uint32_t))
    throw ModelFormatError("model file has " + std::to_string(r.remaining() - 4) +
                           " unexpected trailing bytes");
  const auto stored = r.get<std::uint32_t>();
  if (stored != crc_of(bytes.data(), body)) throw ModelFormatError("model file CRC mismatch");
  return p;
}

void save_params(const GnnParams& params, const std::filesystem::path& path) {
  const auto bytes = encode_params(params);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot open '" + path.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw InputError("failed writing '" + path.string() + "'");
}

GnnParams load_params(const std::filesystem::path& path, const GnnDims& expected) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open model file '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_params(bytes, expected);
  } catch (const ModelFormatError& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  }
}

}  // namespace fasbeam
