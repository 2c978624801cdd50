#include "mlnn/model_file.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "mlnn/errors.hpp"

namespace mlnn {
namespace {

constexpr std::array<char, 8> kMagic{'M', 'L', 'N', 'N', 'M', 'O', 'D', 'L'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void u64(std::uint64_t v) { little_endian(v, 8); }
  void f64(double v) { little_endian(std::bit_cast<std::uint64_t>(v), 8); }
  void f64s(const std::vector<double>& vs) {
    for (double v : vs) f64(v);
  }

 private:
  void little_endian(std::uint64_t v, int bytes) {
    char buf[8];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(buf, bytes);
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(little_endian(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
  std::uint64_t u64() { return little_endian(8); }
  double f64() { return std::bit_cast<double>(little_endian(8)); }
  std::vector<double> f64s(std::uint64_t count) {
    std::vector<double> out(count);
    for (auto& v : out) v = f64();
    return out;
  }
  void bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) throw ParseError("model file is truncated", 0);
  }

 private:
  std::uint64_t little_endian(int n) {
    unsigned char buf[8];
    bytes(reinterpret_cast<char*>(buf), static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
    return v;
  }
  std::istream& in_;
};

template <typename Enum>
Enum checked_enum(std::uint8_t raw, std::uint8_t max, const char* what) {
  if (raw > max) throw ParseError(fmt::format("model file has invalid {} code {}", what, raw), 0);
  return static_cast<Enum>(raw);
}

}  // namespace

void save_model(std::ostream& out, const ModelFile& file) {
  const auto& p = file.model.params;
  const Shape& s = p.shape;
  if (file.threshold && file.threshold->theta.size() != s.inputs)
    throw DimensionError("threshold model dimension differs from the network input dimension");
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.u32(kModelFileVersion);
  w.u64(s.inputs);
  w.u64(s.hidden);
  w.u64(s.labels);
  w.u8(static_cast<std::uint8_t>(file.model.hidden_act));
  w.u8(static_cast<std::uint8_t>(file.model.output_act()));
  w.u8(static_cast<std::uint8_t>(file.model.loss.kind));
  w.u8(static_cast<std::uint8_t>(file.model.loss.weighting));
  w.f64s(p.w1);
  w.f64s(p.b1);
  w.f64s(p.w2);
  w.f64s(p.b2);
  w.u8(file.threshold ? 1 : 0);
  if (file.threshold) {
    w.f64s(file.threshold->theta);
    w.f64(file.threshold->intercept);
    w.f64(file.threshold->lambda);
  }
  if (!out) throw Error("failed writing model file");
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  save_model(out, file);
}

ModelFile load_model(std::istream& in) {
  Reader r(in);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw ParseError("not a model file (bad magic)", 0);
  const std::uint32_t version = r.u32();
  if (version != kModelFileVersion) throw ParseError(fmt::format("unsupported model file version {}", version), 0);

  ModelFile file;
  Shape s;
  s.inputs = r.u64();
  s.hidden = r.u64();
  s.labels = r.u64();
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 34;
  if (s.inputs > kLimit || s.hidden > kLimit || s.labels > kLimit || s.inputs * s.hidden > kLimit ||
      s.labels * s.hidden > kLimit)
    throw ParseError("model file dimensions are implausible", 0);
  file.model.hidden_act = checked_enum<Activation>(r.u8(), 2, "hidden activation");
  const auto output_act = checked_enum<Activation>(r.u8(), 2, "output activation");
  file.model.loss.kind = checked_enum<LossKind>(r.u8(), 1, "loss");
  file.model.loss.weighting = checked_enum<LabelWeighting>(r.u8(), 1, "label weighting");
  if (output_act != file.model.output_act())
    throw ParseError("model file output activation does not match its loss", 0);

  auto& p = file.model.params;
  p.shape = s;
  p.w1 = r.f64s(s.inputs * s.hidden);
  p.b1 = r.f64s(s.hidden);
  p.w2 = r.f64s(s.labels * s.hidden);
  p.b2 = r.f64s(s.labels);
  const std::uint8_t has_threshold = r.u8();
  if (has_threshold > 1) throw ParseError("model file has an invalid threshold flag", 0);
  if (has_threshold) {
    ThresholdModel t;
    t.theta = r.f64s(s.inputs);
    t.intercept = r.f64();
    t.lambda = r.f64();
    file.threshold = std::move(t);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes after model data", 0);
  return file;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  return load_model(in);
}

}  // namespace mlnn
