#include "netdiff/params.hpp"

#include <cstring>
#include <fstream>

#include "netdiff/errors.hpp"

namespace netdiff::numerics {

void ParamSet::add(const std::string& name, Tensor value) {
  require(!has(name), "duplicate parameter name: " + name);
  Tensor grad = Tensor::zeros(value.shape());
  order_.push_back(name);
  slots_.emplace(name, Slot{std::move(value), std::move(grad)});
}

bool ParamSet::has(const std::string& name) const { return slots_.count(name) > 0; }

Tensor& ParamSet::value(const std::string& name) {
  auto it = slots_.find(name);
  require(it != slots_.end(), "unknown parameter: " + name);
  return it->second.value;
}

const Tensor& ParamSet::value(const std::string& name) const {
  auto it = slots_.find(name);
  require(it != slots_.end(), "unknown parameter: " + name);
  return it->second.value;
}

Tensor& ParamSet::grad(const std::string& name) {
  auto it = slots_.find(name);
  require(it != slots_.end(), "unknown parameter: " + name);
  return it->second.grad;
}

const Tensor& ParamSet::grad(const std::string& name) const {
  auto it = slots_.find(name);
  require(it != slots_.end(), "unknown parameter: " + name);
  return it->second.grad;
}

std::int64_t ParamSet::total_size() const {
  std::int64_t n = 0;
  for (const auto& name : order_) n += slots_.at(name).value.size();
  return n;
}

void ParamSet::zero_grads() {
  for (const auto& name : order_) slots_.at(name).grad.fill(0.0);
  grads_populated_ = false;
}

void ParamSet::zero_values_with_prefix(const std::string& prefix) {
  for (const auto& name : order_) {
    if (name.rfind(prefix, 0) == 0) slots_.at(name).value.fill(0.0);
  }
}

void ParamSet::for_each(const std::function<void(const std::string&, Tensor&, Tensor&)>& fn) {
  for (const auto& name : order_) {
    Slot& s = slots_.at(name);
    fn(name, s.value, s.grad);
  }
}

namespace {

constexpr char kMagic[4] = {'N', 'D', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ParseError("checkpoint: truncated file");
  return v;
}

void write_string(std::ostream& os, const std::string& s) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
  const auto len = read_pod<std::uint32_t>(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw ParseError("checkpoint: truncated string");
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointHeader& header,
                     const ParamSet& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, 4);
  write_pod(os, kVersion);
  write_string(os, header.module);
  write_pod(os, header.h);
  write_pod(os, header.t);
  write_pod(os, header.c);
  write_pod(os, header.l);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(header.extra.size()));
  for (const auto& [k, v] : header.extra) {
    write_string(os, k);
    write_pod(os, v);
  }
  write_pod<std::uint64_t>(os, params.count());
  for (const auto& name : params.names()) {
    const Tensor& t = params.value(name);
    write_string(os, name);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.ndim()));
    for (std::size_t d = 0; d < t.ndim(); ++d) write_pod<std::int64_t>(os, t.dim(d));
    os.write(reinterpret_cast<const char*>(t.data()),
             static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!os) throw IoError("checkpoint write failed: " + path);
}

std::pair<CheckpointHeader, ParamSet> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("checkpoint: bad magic in " + path);
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kVersion) throw ParseError("checkpoint: unsupported version");
  CheckpointHeader header;
  header.module = read_string(is);
  header.h = read_pod<std::int64_t>(is);
  header.t = read_pod<std::int64_t>(is);
  header.c = read_pod<std::int64_t>(is);
  header.l = read_pod<std::int64_t>(is);
  const auto n_extra = read_pod<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < n_extra; ++i) {
    std::string k = read_string(is);
    header.extra[k] = read_pod<double>(is);
  }
  ParamSet params;
  const auto count = read_pod<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = read_string(is);
    const auto ndim = read_pod<std::uint32_t>(is);
    std::vector<std::int64_t> shape(ndim);
    for (auto& d : shape) d = read_pod<std::int64_t>(is);
    Tensor t(shape);
    is.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!is) throw ParseError("checkpoint: truncated tensor " + name);
    params.add(name, std::move(t));
  }
  return {header, std::move(params)};
}

}  // namespace netdiff::numerics
