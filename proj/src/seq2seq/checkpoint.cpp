#include "bcsmile/seq2seq/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "bcsmile/error.hpp"

namespace bcsmile::seq2seq {
namespace {

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos, const std::string& file) {
  if (pos + sizeof(T) > in.size()) throw Error(file + ": truncated checkpoint");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<T>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += sizeof(T);
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params, const CheckpointMeta& meta) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : params.tensors())
    tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
  const nlohmann::json header{{"config", to_json(meta.config)},
                              {"seed", meta.seed},
                              {"epoch", meta.epoch},
                              {"best_val", meta.best_val},
                              {"tensors", tensors}};
  const std::string text = header.dump();

  std::string out(kCheckpointMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  for (double v : params.flat()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write checkpoint " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string file = path.string();
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open checkpoint " + file);
  const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (in.size() < 16 || std::memcmp(in.data(), kCheckpointMagic, 4) != 0) throw Error(file + ": not a checkpoint");
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(in, pos, file);
  if (version != kCheckpointVersion) throw Error(file + ": unsupported checkpoint version " + std::to_string(version));
  const auto header_len = get_le<std::uint64_t>(in, pos, file);
  if (pos + header_len > in.size()) throw Error(file + ": truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.substr(pos, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(file + ": bad checkpoint header: " + e.what());
  }
  pos += header_len;

  Checkpoint ck;
  try {
    ck.meta.config = train_config_from_json(header.at("config"));
    ck.meta.seed = header.at("seed").get<std::uint64_t>();
    ck.meta.epoch = header.at("epoch").get<int>();
    ck.meta.best_val = header.at("best_val").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(file + ": bad checkpoint header: " + e.what());
  }
  ck.params = ModelParams(ck.meta.config.shape);
  const auto& table = header.at("tensors");
  if (table.size() != ck.params.tensors().size()) throw Error(file + ": tensor table does not match the model shape");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& t = ck.params.tensors()[i];
    if (table[i].at("name").get<std::string>() != t.name || table[i].at("rows").get<std::size_t>() != t.rows ||
        table[i].at("cols").get<std::size_t>() != t.cols)
      throw Error(file + ": tensor " + std::to_string(i) + " does not match the model shape");
  }
  auto flat = ck.params.flat();
  if (in.size() - pos != flat.size() * 8)
    throw Error(file + ": expected " + std::to_string(flat.size()) + " parameters");
  for (double& v : flat) v = std::bit_cast<double>(get_le<std::uint64_t>(in, pos, file));
  return ck;
}

}  // namespace bcsmile::seq2seq
