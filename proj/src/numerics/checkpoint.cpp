#include "kiwi/numerics/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "kiwi/common.hpp"

namespace kiwi::numerics {

namespace {

constexpr char kMagic[8] = {'K', 'I', 'W', 'I', 'P', 'R', 'M', '\0'};

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) {
  put_u64(out, std::bit_cast<uint64_t>(d));
}

class Reader {
 public:
  Reader(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<uint32_t>(static_cast<unsigned char>(data_[pos_ + static_cast<size_t>(i)])) << (8 * i);
    pos_ += 4;
    return v;
  }

  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<uint64_t>(static_cast<unsigned char>(data_[pos_ + static_cast<size_t>(i)])) << (8 * i);
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string bytes(size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(size_t n) {
    if (pos_ + n > data_.size())
      throw NumericsError(strformat(
          "checkpoint %s: truncated file (needed %zu bytes at offset %zu)",
          path_.c_str(), n, pos_));
  }

  const std::string& data_;
  std::string path_;
  size_t pos_ = 0;
};

}  // namespace

void save_parameters(const std::string& path,
                     const std::vector<TensorPtr>& params) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kParamFileVersion);
  put_u32(out, static_cast<uint32_t>(params.size()));
  for (const auto& p : params) {
    if (p->name.empty())
      throw NumericsError("save_parameters: parameter without a name");
    put_u32(out, static_cast<uint32_t>(p->name.size()));
    out.append(p->name);
    put_u32(out, static_cast<uint32_t>(p->shape().size()));
    for (size_t d : p->shape()) put_u64(out, d);
    for (double v : p->values()) put_f64(out, v);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw NumericsError("save_parameters: cannot open " + path);
  f.write(out.data(), static_cast<long>(out.size()));
  f.flush();
  if (!f) throw NumericsError("save_parameters: write failed for " + path);
}

std::vector<TensorPtr> load_parameters(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw NumericsError("load_parameters: cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  Reader r(data, path);
  const std::string magic = r.bytes(sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0)
    throw NumericsError(strformat("checkpoint %s: bad magic", path.c_str()));
  const uint32_t version = r.u32();
  if (version != kParamFileVersion)
    throw NumericsError(
        strformat("checkpoint %s: unsupported version %u (expected %u)",
                  path.c_str(), version, kParamFileVersion));
  const uint32_t count = r.u32();
  std::vector<TensorPtr> params;
  params.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = r.u32();
    std::string name = r.bytes(name_len);
    const uint32_t rank = r.u32();
    std::vector<size_t> shape(rank);
    size_t numel = 1;
    for (uint32_t d = 0; d < rank; ++d) {
      shape[d] = static_cast<size_t>(r.u64());
      numel *= shape[d];
    }
    std::vector<double> values(numel);
    for (size_t k = 0; k < numel; ++k) values[k] = r.f64();
    auto t = make_tensor(std::move(shape), std::move(values));
    t->name = std::move(name);
    params.push_back(std::move(t));
  }
  if (!r.at_end())
    throw NumericsError(
        strformat("checkpoint %s: trailing bytes after last parameter",
                  path.c_str()));
  return params;
}

void load_parameters_into(const std::string& path,
                          const std::vector<TensorPtr>& params) {
  auto loaded = load_parameters(path);
  std::map<std::string, TensorPtr> by_name;
  for (auto& t : loaded) {
    if (!by_name.emplace(t->name, t).second)
      throw NumericsError(strformat("checkpoint %s: duplicate parameter '%s'",
                                    path.c_str(), t->name.c_str()));
  }
  for (const auto& p : params) {
    auto it = by_name.find(p->name);
    if (it == by_name.end())
      throw NumericsError(strformat("checkpoint %s: missing parameter '%s'",
                                    path.c_str(), p->name.c_str()));
    if (it->second->shape() != p->shape())
      throw NumericsError(strformat("checkpoint %s: shape mismatch for '%s'",
                                    path.c_str(), p->name.c_str()));
    p->values() = it->second->values();
    by_name.erase(it);
  }
  if (!by_name.empty())
    throw NumericsError(strformat("checkpoint %s: unexpected parameter '%s'",
                                  path.c_str(),
                                  by_name.begin()->first.c_str()));
}

}  // namespace kiwi::numerics
