#include "rcgan/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rcgan/errors.hpp"

namespace rcgan {

const char* activation_name(DisActivation a) {
  return a == DisActivation::Sigmoid ? "sigmoid" : "leakyrelu";
}

DisActivation parse_activation(const std::string& s) {
  if (s == "sigmoid") return DisActivation::Sigmoid;
  if (s == "leakyrelu") return DisActivation::LeakyRelu;
  throw ConfigError("unknown activation: " + s + " (expected sigmoid or leakyrelu)");
}

const char* identity_mode_name(IdentityMode m) {
  return m == IdentityMode::Pixel ? "pixel" : "feature";
}

IdentityMode parse_identity_mode(const std::string& s) {
  if (s == "pixel") return IdentityMode::Pixel;
  if (s == "feature") return IdentityMode::Feature;
  throw ConfigError("unknown identity mode: " + s + " (expected pixel or feature)");
}

void TrainConfig::validate() const {
  if (image_size <= 0) throw ConfigError("image_size must be positive");
  if (image_size % 4 != 0) throw ConfigError("image_size must be divisible by 4");
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch <= 0) throw ConfigError("batch must be positive");
  if (lr_gen <= 0.0 || lr_dis <= 0.0) throw ConfigError("learning rates must be positive");
  if (n_rmi <= 0) throw ConfigError("n_rmi must be positive");
  if (suppression_ratio < 1) throw ConfigError("suppression_ratio must be >= 1");
  if (gen_width < 1 || dis_width < 1 || rmi_width < 1 || feat_width < 1)
    throw ConfigError("network widths must be >= 1");
  if (checkpoint_every < 1 || sample_every < 1)
    throw ConfigError("checkpoint_every and sample_every must be >= 1");
  if (weights.lambda_d < 0 || weights.lambda_g < 0 || weights.lambda_cycle < 0 ||
      weights.lambda_im < 0 || weights.lambda_if < 0)
    throw ConfigError("loss weights must be non-negative");
  if (decay_epoch_half < 0 || decay_epoch_quarter < decay_epoch_half)
    throw ConfigError("decay epochs must satisfy 0 <= half <= quarter");
}

namespace {

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Trim to the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[48];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') throw ConfigError("bad number for " + key + ": " + v);
  return d;
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (...) {
    throw ConfigError("bad integer for " + key + ": " + v);
  }
  if (pos != v.size()) throw ConfigError("bad integer for " + key + ": " + v);
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(v, &pos);
  } catch (...) {
    throw ConfigError("bad integer for " + key + ": " + v);
  }
  if (pos != v.size()) throw ConfigError("bad integer for " + key + ": " + v);
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean for " + key + ": " + v);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string serialize_config(const TrainConfig& cfg) {
  std::ostringstream os;
  os << "image_size = " << cfg.image_size << "\n";
  os << "epochs = " << cfg.epochs << "\n";
  os << "batch = " << cfg.batch << "\n";
  os << "adam_beta1 = " << fmt_double(cfg.adam_beta1) << "\n";
  os << "adam_beta2 = " << fmt_double(cfg.adam_beta2) << "\n";
  os << "lr_gen = " << fmt_double(cfg.lr_gen) << "\n";
  os << "lr_dis = " << fmt_double(cfg.lr_dis) << "\n";
  os << "decay_epoch_half = " << cfg.decay_epoch_half << "\n";
  os << "decay_epoch_quarter = " << cfg.decay_epoch_quarter << "\n";
  os << "n_rmi = " << cfg.n_rmi << "\n";
  os << "suppression_ratio = " << cfg.suppression_ratio << "\n";
  os << "activation = " << activation_name(cfg.activation) << "\n";
  os << "use_labels = " << (cfg.use_labels ? "true" : "false") << "\n";
  os << "identity_mode = " << identity_mode_name(cfg.identity_mode) << "\n";
  os << "lambda_d = " << fmt_double(cfg.weights.lambda_d) << "\n";
  os << "lambda_g = " << fmt_double(cfg.weights.lambda_g) << "\n";
  os << "lambda_cycle = " << fmt_double(cfg.weights.lambda_cycle) << "\n";
  os << "lambda_im = " << fmt_double(cfg.weights.lambda_im) << "\n";
  os << "lambda_if = " << fmt_double(cfg.weights.lambda_if) << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "gen_width = " << cfg.gen_width << "\n";
  os << "dis_width = " << cfg.dis_width << "\n";
  os << "rmi_width = " << cfg.rmi_width << "\n";
  os << "feat_width = " << cfg.feat_width << "\n";
  os << "feature_weights = " << cfg.feature_weights << "\n";
  os << "feature_seed = " << cfg.feature_seed << "\n";
  os << "checkpoint_every = " << cfg.checkpoint_every << "\n";
  os << "sample_every = " << cfg.sample_every << "\n";
  os << "data = " << cfg.data_dir << "\n";
  os << "out = " << cfg.out_dir << "\n";
  return os.str();
}

TrainConfig parse_config_text(const std::string& text) {
  TrainConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key == "image_size")
      cfg.image_size = static_cast<int>(parse_int(key, val));
    else if (key == "epochs")
      cfg.epochs = static_cast<int>(parse_int(key, val));
    else if (key == "batch")
      cfg.batch = static_cast<int>(parse_int(key, val));
    else if (key == "adam_beta1")
      cfg.adam_beta1 = parse_double(key, val);
    else if (key == "adam_beta2")
      cfg.adam_beta2 = parse_double(key, val);
    else if (key == "lr_gen")
      cfg.lr_gen = parse_double(key, val);
    else if (key == "lr_dis")
      cfg.lr_dis = parse_double(key, val);
    else if (key == "decay_epoch_half")
      cfg.decay_epoch_half = static_cast<int>(parse_int(key, val));
    else if (key == "decay_epoch_quarter")
      cfg.decay_epoch_quarter = static_cast<int>(parse_int(key, val));
    else if (key == "n_rmi")
      cfg.n_rmi = static_cast<int>(parse_int(key, val));
    else if (key == "suppression_ratio")
      cfg.suppression_ratio = static_cast<int>(parse_int(key, val));
    else if (key == "activation")
      cfg.activation = parse_activation(val);
    else if (key == "use_labels")
      cfg.use_labels = parse_bool(key, val);
    else if (key == "identity_mode")
      cfg.identity_mode = parse_identity_mode(val);
    else if (key == "lambda_d")
      cfg.weights.lambda_d = parse_double(key, val);
    else if (key == "lambda_g")
      cfg.weights.lambda_g = parse_double(key, val);
    else if (key == "lambda_cycle")
      cfg.weights.lambda_cycle = parse_double(key, val);
    else if (key == "lambda_im")
      cfg.weights.lambda_im = parse_double(key, val);
    else if (key == "lambda_if")
      cfg.weights.lambda_if = parse_double(key, val);
    else if (key == "seed")
      cfg.seed = parse_u64(key, val);
    else if (key == "gen_width")
      cfg.gen_width = static_cast<int>(parse_int(key, val));
    else if (key == "dis_width")
      cfg.dis_width = static_cast<int>(parse_int(key, val));
    else if (key == "rmi_width")
      cfg.rmi_width = static_cast<int>(parse_int(key, val));
    else if (key == "feat_width")
      cfg.feat_width = static_cast<int>(parse_int(key, val));
    else if (key == "feature_weights")
      cfg.feature_weights = val;
    else if (key == "feature_seed")
      cfg.feature_seed = parse_u64(key, val);
    else if (key == "checkpoint_every")
      cfg.checkpoint_every = static_cast<int>(parse_int(key, val));
    else if (key == "sample_every")
      cfg.sample_every = static_cast<int>(parse_int(key, val));
    else if (key == "data")
      cfg.data_dir = val;
    else if (key == "out")
      cfg.out_dir = val;
    else
      throw ConfigError("unknown config key: " + key);
  }
  return cfg;
}

TrainConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void write_config_file(const TrainConfig& cfg, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write config file: " + path.string());
  f << serialize_config(cfg);
}

std::uint64_t config_hash(const TrainConfig& cfg) {
  // Only fields that determine the training trajectory participate. Run
  // bookkeeping (directories, snapshot cadence) and the total epoch budget
  // are masked out so a checkpoint can be resumed into a fresh directory or
  // extended past its original schedule.
  TrainConfig key = cfg;
  key.epochs = 0;
  key.checkpoint_every = 1;
  key.sample_every = 1;
  key.data_dir.clear();
  key.out_dir.clear();
  const std::string s = serialize_config(key);
  return fnv1a(s.data(), s.size());
}

}  // namespace rcgan
