#include "rcgan/checkpoint.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "rcgan/errors.hpp"

namespace rcgan {

namespace {

constexpr char kMagic[8] = {'R', 'C', 'C', 'K', 'P', 'T', '0', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_i64(std::ostream& out, std::int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_bytes(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_doubles(std::ostream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

std::uint64_t get_u64(std::istream& in, const char* what) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw IoError(std::string("checkpoint: truncated reading ") + what);
  return v;
}

std::int64_t get_i64(std::istream& in, const char* what) {
  std::int64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw IoError(std::string("checkpoint: truncated reading ") + what);
  return v;
}

std::string get_bytes(std::istream& in, const char* what) {
  const std::uint64_t n = get_u64(in, what);
  if (n > (1ull << 32)) throw IoError(std::string("checkpoint: implausible length for ") + what);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw IoError(std::string("checkpoint: truncated reading ") + what);
  return s;
}

void get_doubles(std::istream& in, double* p, std::size_t n, const char* what) {
  in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw IoError(std::string("checkpoint: truncated reading ") + what);
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p.replace_extension(".json");
  return p;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::uint64_t Checkpoint::params_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const TensorRecord& r : tensors) {
    h = fnv1a(r.name.data(), r.name.size(), h);
    h = tensor_checksum(r.value, h);
  }
  return h;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint: " + path.string());

  out.write(kMagic, 8);
  put_u64(out, c.config_hash);
  put_i64(out, c.epoch);
  put_i64(out, c.global_step);
  put_bytes(out, c.config_text);
  put_bytes(out, c.rng_state);

  put_u64(out, c.tensors.size());
  for (const TensorRecord& r : c.tensors) {
    put_bytes(out, r.name);
    put_u64(out, static_cast<std::uint64_t>(r.value.rank()));
    for (int d : r.value.dims()) put_i64(out, d);
    put_doubles(out, r.value.data(), r.value.size());
  }

  put_u64(out, c.opt_state.size());
  put_doubles(out, c.opt_state.data(), c.opt_state.size());
  put_u64(out, c.gen_steps);
  put_u64(out, c.dis_steps);

  put_u64(out, c.loss_tail.size());
  for (const LossBreakdown& b : c.loss_tail) {
    const double row[6] = {b.dis, b.gen, b.cycle, b.ident_m, b.ident_f, b.total};
    put_doubles(out, row, 6);
  }
  out.close();
  if (!out) throw IoError("write failed for checkpoint: " + path.string());

  nlohmann::json side;
  side["format"] = "rcgan-checkpoint-v1";
  side["epoch"] = c.epoch;
  side["global_step"] = c.global_step;
  side["config_hash"] = hash_hex(c.config_hash);
  side["params_checksum"] = hash_hex(c.params_checksum());
  side["tensor_count"] = c.tensors.size();
  side["optimizer_elements"] = c.opt_state.size();
  side["generator_adam_steps"] = c.gen_steps;
  side["discriminator_adam_steps"] = c.dis_steps;
  side["rng_state"] = c.rng_state;
  side["config"] = c.config_text;
  nlohmann::json tail = nlohmann::json::array();
  for (const LossBreakdown& b : c.loss_tail)
    tail.push_back({{"dis", b.dis},
                    {"gen", b.gen},
                    {"cycle", b.cycle},
                    {"ident_m", b.ident_m},
                    {"ident_f", b.ident_f},
                    {"total", b.total}});
  side["loss_tail"] = tail;

  std::ofstream js(sidecar_path(path), std::ios::trunc);
  if (!js) throw IoError("cannot write checkpoint sidecar: " + sidecar_path(path).string());
  js << side.dump(2) << "\n";
  if (!js) throw IoError("write failed for checkpoint sidecar: " + sidecar_path(path).string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());

  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != std::string(kMagic, 8))
    throw IoError("not a checkpoint file: " + path.string());

  Checkpoint c;
  c.config_hash = get_u64(in, "config hash");
  c.epoch = get_i64(in, "epoch");
  c.global_step = get_i64(in, "global step");
  c.config_text = get_bytes(in, "config text");
  c.rng_state = get_bytes(in, "rng state");

  const std::uint64_t n_tensors = get_u64(in, "tensor count");
  if (n_tensors > (1ull << 20)) throw IoError("checkpoint: implausible tensor count");
  c.tensors.reserve(n_tensors);
  for (std::uint64_t i = 0; i < n_tensors; ++i) {
    TensorRecord r;
    r.name = get_bytes(in, "tensor name");
    const std::uint64_t rank = get_u64(in, "tensor rank");
    if (rank == 0 || rank > 8) throw IoError("checkpoint: implausible tensor rank");
    std::vector<int> dims(rank);
    for (std::uint64_t d = 0; d < rank; ++d) {
      const std::int64_t v = get_i64(in, "tensor dim");
      if (v <= 0 || v > (1 << 24)) throw IoError("checkpoint: implausible tensor dim");
      dims[d] = static_cast<int>(v);
    }
    r.value = Tensor(dims);
    get_doubles(in, r.value.data(), r.value.size(), r.name.c_str());
    c.tensors.push_back(std::move(r));
  }

  const std::uint64_t n_opt = get_u64(in, "optimizer state size");
  if (n_opt > (1ull << 32)) throw IoError("checkpoint: implausible optimizer state size");
  c.opt_state.resize(n_opt);
  get_doubles(in, c.opt_state.data(), c.opt_state.size(), "optimizer state");
  c.gen_steps = get_u64(in, "generator adam steps");
  c.dis_steps = get_u64(in, "discriminator adam steps");

  const std::uint64_t n_tail = get_u64(in, "loss tail size");
  if (n_tail > (1ull << 20)) throw IoError("checkpoint: implausible loss tail size");
  c.loss_tail.reserve(n_tail);
  for (std::uint64_t i = 0; i < n_tail; ++i) {
    double row[6];
    get_doubles(in, row, 6, "loss tail");
    LossBreakdown b;
    b.dis = row[0];
    b.gen = row[1];
    b.cycle = row[2];
    b.ident_m = row[3];
    b.ident_f = row[4];
    b.total = row[5];
    c.loss_tail.push_back(b);
  }
  return c;
}

}  // namespace rcgan
