#include "fgprop/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "fgprop/corpus.h"
#include "fgprop/error.h"

namespace fgprop {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'F', 'G', 'P', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

nlohmann::json block_list(const Parameters &p) {
  nlohmann::json blocks = nlohmann::json::array();
  p.visit([&](std::string_view name, const double *, std::size_t n, bool) {
    blocks.push_back({{"name", std::string(name)}, {"count", n}});
  });
  return blocks;
}

// Allocates every block at the shape implied by the model config.
Parameters shaped_parameters(const ModelConfig &config) {
  return MgnModel::create(config).params;
}

}  // namespace

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt) {
  const MgnModel &m = ckpt.model;
  nlohmann::json header = {
      {"architecture", std::string(architecture_name(m.config.architecture))},
      {"gate", std::string(gate_activation_name(m.config.gate))},
      {"dimension", m.config.dimension},
      {"alpha", m.config.alpha},
      {"positive_weight", m.config.positive_weight},
      {"seed", m.config.seed},
      {"blocks", block_list(m.params)},
      {"meta", ckpt.meta},
  };
  if (m.params.gate.frozen_weight) {
    header["frozen_gate"] = *m.params.gate.frozen_weight;
  }
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  const std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char *>(&version), sizeof version);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char *>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  m.params.visit([&](std::string_view, const double *data, std::size_t n, bool) {
    out.write(reinterpret_cast<const char *>(data),
              static_cast<std::streamsize>(n * sizeof(double)));
  });
  if (!out) throw Error("error writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  const std::string source = path.string();
  if (!std::filesystem::exists(path)) {
    throw Error("checkpoint " + source + " does not exist");
  }
  const std::string bytes = read_file(path);
  const std::size_t prefix = sizeof kMagic + sizeof(std::uint32_t) + sizeof(std::uint64_t);
  if (bytes.size() < prefix || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError(source, 0, "not a checkpoint file");
  }
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + sizeof kMagic, sizeof version);
  if (version != kVersion) {
    throw FormatError(source, 0,
                      "unsupported checkpoint version " + std::to_string(version));
  }
  std::uint64_t len;
  std::memcpy(&len, bytes.data() + sizeof kMagic + sizeof version, sizeof len);
  if (len > bytes.size() - prefix) {
    throw FormatError(source, 0, "truncated checkpoint header");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(prefix, len));
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(source, 0, std::string("malformed checkpoint header: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    ModelConfig config;
    auto arch = parse_architecture(header.at("architecture").get<std::string>());
    auto gate = parse_gate_activation(header.at("gate").get<std::string>());
    if (!arch || !gate) throw FormatError(source, 0, "unknown architecture or gate");
    config.architecture = *arch;
    config.gate = *gate;
    config.dimension = header.at("dimension").get<std::size_t>();
    config.alpha = header.at("alpha").get<double>();
    config.positive_weight = header.at("positive_weight").get<double>();
    config.seed = header.at("seed").get<std::uint64_t>();
    ckpt.model.config = config;
    ckpt.model.params = shaped_parameters(config);
    if (header.contains("frozen_gate")) {
      ckpt.model.params.gate.frozen_weight = header["frozen_gate"].get<double>();
    }
    ckpt.meta = header.value("meta", nlohmann::json::object());
    if (header.at("blocks") != block_list(ckpt.model.params)) {
      throw FormatError(source, 0, "parameter blocks do not match the architecture");
    }
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(source, 0, std::string("malformed checkpoint header: ") + e.what());
  } catch (const FormatError &) {
    throw;
  } catch (const Error &e) {
    throw FormatError(source, 0, e.what());
  }

  std::size_t pos = prefix + len;
  const std::size_t expected = ckpt.model.params.size() * sizeof(double);
  if (bytes.size() - pos < expected) {
    throw FormatError(source, 0, "truncated parameter payload");
  }
  if (bytes.size() - pos > expected) {
    throw FormatError(source, 0, "trailing bytes after parameter payload");
  }
  ckpt.model.params.visit([&](std::string_view, double *data, std::size_t n, bool) {
    std::memcpy(data, bytes.data() + pos, n * sizeof(double));
    pos += n * sizeof(double);
  });
  return ckpt;
}

}  // namespace fgprop
