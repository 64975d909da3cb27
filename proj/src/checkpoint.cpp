#include "otgforge/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "otgforge/error.hpp"

namespace otgforge {
namespace {

constexpr char kMagic[8] = {'O', 'T', 'G', 'C', 'K', 'P', 'T', '\0'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void raw(const char* data, std::size_t n) { bytes_.insert(bytes_.end(), data, data + n); }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  std::string str() {
    const std::size_t n = u32();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    std::string_view v(bytes_.data() + pos_, n);
    pos_ += n;
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::kMalformedCheckpoint, "truncated checkpoint");
  }
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void Checkpoint::add_tensor(const std::string& name, const Eigen::MatrixXd& value) {
  Tensor t;
  t.name = name;
  t.rows = static_cast<std::uint64_t>(value.rows());
  t.cols = static_cast<std::uint64_t>(value.cols());
  t.data.resize(static_cast<std::size_t>(value.size()));
  for (Eigen::Index i = 0; i < value.size(); ++i) t.data[static_cast<std::size_t>(i)] = static_cast<float>(value.data()[i]);
  tensors.push_back(std::move(t));
}

Eigen::MatrixXd Checkpoint::tensor(const std::string& name, Eigen::Index rows, Eigen::Index cols) const {
  for (const auto& t : tensors) {
    if (t.name != name) continue;
    if (t.rows != static_cast<std::uint64_t>(rows) || t.cols != static_cast<std::uint64_t>(cols)) {
      throw Error(ErrorCode::kMalformedCheckpoint,
                  "tensor '" + name + "' has shape " + std::to_string(t.rows) + "x" + std::to_string(t.cols) +
                      ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = t.data[static_cast<std::size_t>(i)];
    return m;
  }
  throw Error(ErrorCode::kMalformedCheckpoint, "missing tensor '" + name + "'");
}

const std::string& Checkpoint::get_meta(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw Error(ErrorCode::kMalformedCheckpoint, "missing metadata '" + key + "'");
  return it->second;
}

const std::vector<std::string>& Checkpoint::get_list(const std::string& name) const {
  const auto it = lists.find(name);
  if (it == lists.end()) throw Error(ErrorCode::kMalformedCheckpoint, "missing list '" + name + "'");
  return it->second;
}

void Checkpoint::write(const std::filesystem::path& path) const {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kFormatVersion);
  w.str(kind);
  w.u32(static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    w.str(k);
    w.str(v);
  }
  w.u32(static_cast<std::uint32_t>(lists.size()));
  for (const auto& [name, items] : lists) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(items.size()));
    for (const auto& item : items) w.str(item);
  }
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    w.str(t.name);
    w.u32(2);
    w.u64(t.rows);
    w.u64(t.cols);
    for (float f : t.data) w.u32(std::bit_cast<std::uint32_t>(f));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
}

Checkpoint Checkpoint::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Reader r(std::string(std::istreambuf_iterator<char>(in), {}));
  if (r.raw(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw Error(ErrorCode::kMalformedCheckpoint, path.string() + " is not a checkpoint");
  }
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kMalformedCheckpoint, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.kind = r.str();
  for (std::uint32_t n = r.u32(); n > 0; --n) {
    std::string key = r.str();
    ckpt.meta[key] = r.str();
  }
  for (std::uint32_t n = r.u32(); n > 0; --n) {
    std::string name = r.str();
    auto& items = ckpt.lists[name];
    for (std::uint32_t m = r.u32(); m > 0; --m) items.push_back(r.str());
  }
  for (std::uint32_t n = r.u32(); n > 0; --n) {
    Tensor t;
    t.name = r.str();
    if (r.u32() != 2) throw Error(ErrorCode::kMalformedCheckpoint, "only rank-2 tensors are supported");
    t.rows = r.u64();
    t.cols = r.u64();
    t.data.resize(static_cast<std::size_t>(t.rows * t.cols));
    for (auto& f : t.data) f = std::bit_cast<float>(r.u32());
    ckpt.tensors.push_back(std::move(t));
  }
  if (!r.done()) throw Error(ErrorCode::kMalformedCheckpoint, "trailing bytes in checkpoint");
  return ckpt;
}

}  // namespace otgforge
