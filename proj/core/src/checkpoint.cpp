#include "crx/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "crx/errors.hpp"

namespace crx::nn {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'R', 'X', 'C', 'K', 'P', 'T', '\0'};

enum class Section : std::uint32_t { Network = 1, Optimizer = 2, Rng = 3, Metadata = 4 };

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw IoError("checkpoint: truncated stream");
  }
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  auto n = get<std::uint64_t>(in);
  if (n > (1ULL << 32)) throw IoError("checkpoint: implausible string length");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw IoError("checkpoint: truncated stream");
  }
  return s;
}

void put_doubles(std::ostream& out, const VectorXd& v) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

VectorXd get_doubles(std::istream& in) {
  auto n = get<std::uint64_t>(in);
  if (n > (1ULL << 32)) throw IoError("checkpoint: implausible vector length");
  VectorXd v(static_cast<Eigen::Index>(n));
  if (n > 0 && !in.read(reinterpret_cast<char*>(v.data()),
                        static_cast<std::streamsize>(n * sizeof(double)))) {
    throw IoError("checkpoint: truncated stream");
  }
  return v;
}

void put_network(std::ostream& out, const DenseNetwork& net) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& L : net.layers()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(L.in));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(L.out));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(L.segments.size()));
    for (const auto& s : L.segments) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(s.offset));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(s.length));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(s.activation));
    }
  }
  put_doubles(out, net.parameters());
}

DenseNetwork get_network(std::istream& in) {
  auto n_layers = get<std::uint32_t>(in);
  std::vector<LayerShape> layers(n_layers);
  for (auto& L : layers) {
    L.in = static_cast<int>(get<std::uint32_t>(in));
    L.out = static_cast<int>(get<std::uint32_t>(in));
    auto n_seg = get<std::uint32_t>(in);
    L.segments.resize(n_seg);
    for (auto& s : L.segments) {
      s.offset = static_cast<int>(get<std::uint32_t>(in));
      s.length = static_cast<int>(get<std::uint32_t>(in));
      auto act = get<std::uint32_t>(in);
      if (act > static_cast<std::uint32_t>(Activation::GatedSoftmax)) {
        throw IoError("checkpoint: unknown activation tag " + std::to_string(act));
      }
      s.activation = static_cast<Activation>(act);
    }
  }
  DenseNetwork net(std::move(layers));
  VectorXd params = get_doubles(in);
  if (params.size() != net.parameter_count()) {
    throw IoError("checkpoint: parameter count does not match layer shapes");
  }
  net.parameters() = std::move(params);
  return net;
}

}  // namespace

const DenseNetwork& Checkpoint::network(const std::string& name) const {
  for (const auto& [n, net] : networks)
    if (n == name) return net;
  throw IoError("checkpoint: no network named '" + name + "'");
}

const AdamState& Checkpoint::optimizer(const std::string& name) const {
  for (const auto& [n, opt] : optimizers)
    if (n == name) return opt;
  throw IoError("checkpoint: no optimizer named '" + name + "'");
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, Checkpoint::kVersion);
  auto n_sections = ckpt.networks.size() + ckpt.optimizers.size() + 2;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n_sections));
  for (const auto& [name, net] : ckpt.networks) {
    put(out, Section::Network);
    put_string(out, name);
    put_network(out, net);
  }
  for (const auto& [name, opt] : ckpt.optimizers) {
    put(out, Section::Optimizer);
    put_string(out, name);
    put<double>(out, opt.lr);
    put<double>(out, opt.beta1);
    put<double>(out, opt.beta2);
    put<double>(out, opt.eps);
    put<std::int64_t>(out, opt.step);
    put_doubles(out, opt.m);
    put_doubles(out, opt.v);
  }
  put(out, Section::Rng);
  put_string(out, "rng");
  put_string(out, ckpt.rng_state);
  put(out, Section::Metadata);
  put_string(out, "metadata");
  put_string(out, ckpt.metadata);
  if (!out) throw IoError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw IoError("checkpoint: bad magic");
  }
  auto version = get<std::uint32_t>(in);
  if (version != Checkpoint::kVersion) {
    throw IoError("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint ckpt;
  auto n_sections = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_sections; ++i) {
    auto kind = get<Section>(in);
    std::string name = get_string(in);
    switch (kind) {
      case Section::Network:
        ckpt.networks.emplace_back(name, get_network(in));
        break;
      case Section::Optimizer: {
        AdamState s;
        s.lr = get<double>(in);
        s.beta1 = get<double>(in);
        s.beta2 = get<double>(in);
        s.eps = get<double>(in);
        s.step = get<std::int64_t>(in);
        s.m = get_doubles(in);
        s.v = get_doubles(in);
        ckpt.optimizers.emplace_back(name, std::move(s));
        break;
      }
      case Section::Rng: ckpt.rng_state = get_string(in); break;
      case Section::Metadata: ckpt.metadata = get_string(in); break;
      default:
        throw IoError("checkpoint: unknown section kind " +
                      std::to_string(static_cast<std::uint32_t>(kind)));
    }
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open " + path.string() + " for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path.string());
  return read_checkpoint(in);
}

std::string rng_to_string(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

Rng rng_from_string(const std::string& state) {
  Rng rng;
  std::istringstream is(state);
  is >> rng;
  if (!is) throw IoError("checkpoint: malformed RNG state");
  return rng;
}

}  // namespace crx::nn
