#include "tdtrnn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "tdtrnn/error.h"

namespace tdtrnn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'T', 'D', 'T', 'R', 'N', 'N', 'C', 'K'};

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_.append(s);
  }
  void raw(const void* p, std::size_t n) {
    out_.append(static_cast<const char*>(p), n);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  template <typename T>
  T pod() {
    T v;
    std::memcpy(&v, need(sizeof(T)), sizeof(T));
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    return std::string(need(n), n);
  }
  const char* need(std::size_t n) {
    if (n > in_.size() - pos_) throw FormatError("checkpoint is truncated");
    const char* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::string& in_;
  std::size_t pos_ = 0;
};

const char* activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}

Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw FormatError("unknown activation '" + s + "'");
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw FormatError("checkpoint config: bad value for " + key + ": " + value);
  }
}

}  // namespace

std::string config_to_text(const ModelConfig& c) {
  std::ostringstream out;
  out << "task=" << task_name(c.task) << '\n'
      << "encoder=" << encoder_name(c.encoder) << '\n'
      << "word_dim=" << c.word_dim << '\n'
      << "hidden_size=" << c.hidden << '\n'
      << "dep_embed_size=" << c.dep_embed << '\n'
      << "classifier_hidden=" << c.classifier_hidden << '\n'
      << "max_offset=" << c.max_offset << '\n'
      << "coarse_relations=" << (c.coarse_relations ? 1 : 0) << '\n'
      << "node_activation=" << activation_name(c.activations.node) << '\n'
      << "dep_activation=" << activation_name(c.activations.dep) << '\n';
  return out.str();
}

ModelConfig config_from_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("checkpoint config: bad line '" + line + "'");
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("checkpoint config lacks " + key);
    return it->second;
  };
  ModelConfig c;
  c.task = parse_task(get("task"));
  c.encoder = parse_encoder_kind(get("encoder"));
  c.word_dim = parse_size("word_dim", get("word_dim"));
  c.hidden = parse_size("hidden_size", get("hidden_size"));
  c.dep_embed = parse_size("dep_embed_size", get("dep_embed_size"));
  c.classifier_hidden = parse_size("classifier_hidden", get("classifier_hidden"));
  c.max_offset = parse_size("max_offset", get("max_offset"));
  c.coarse_relations = parse_size("coarse_relations", get("coarse_relations")) != 0;
  c.activations.node = parse_activation(get("node_activation"));
  c.activations.dep = parse_activation(get("dep_activation"));
  return c;
}

std::string serialize_checkpoint(Model& model) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.pod<std::uint32_t>(kCheckpointVersion);
  w.str(config_to_text(model.config));
  w.pod<std::uint64_t>(model.relations.size());
  for (const auto& label : model.relations.labels()) w.str(label);
  const auto params = model.parameters();
  w.pod<std::uint64_t>(params.size());
  for (const auto& p : params) {
    w.str(p.name);
    const Tensor& t = *p.tensor;
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t extent : t.shape()) w.pod<std::uint64_t>(extent);
    w.raw(t.values().data(), t.size() * sizeof(double));
  }
  return w.take();
}

Model deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (std::memcmp(r.need(sizeof(kMagic)), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version));
  }
  const ModelConfig config = config_from_text(r.str());
  const auto n_labels = r.pod<std::uint64_t>();
  RelationVocab relations(config.coarse_relations);
  for (std::uint64_t i = 0; i < n_labels; ++i) {
    const std::string label = r.str();
    if (i == 0) {
      if (label != RelationVocab::kUnkLabel) {
        throw FormatError("checkpoint relation list must start with UNK");
      }
      continue;
    }
    if (relations.add(label) != i) {
      throw FormatError("duplicate relation label '" + label + "'");
    }
  }

  Model model = make_model(config, std::move(relations), 0);
  auto params = model.parameters();
  const auto n_tensors = r.pod<std::uint64_t>();
  if (n_tensors != params.size()) {
    throw FormatError("checkpoint holds " + std::to_string(n_tensors) +
                      " tensors, model expects " + std::to_string(params.size()));
  }
  for (auto& p : params) {
    const std::string name = r.str();
    if (name != p.name) {
      throw FormatError("checkpoint tensor '" + name + "' where '" + p.name +
                        "' was expected");
    }
    const auto rank = r.pod<std::uint32_t>();
    Shape shape;
    for (std::uint32_t k = 0; k < rank; ++k) {
      shape.push_back(static_cast<std::size_t>(r.pod<std::uint64_t>()));
    }
    if (shape != p.tensor->shape()) {
      throw FormatError("tensor '" + name + "' has shape " + shape_string(shape) +
                        ", model expects " + shape_string(p.tensor->shape()));
    }
    const std::size_t n = p.tensor->size();
    std::memcpy(p.tensor->values().data(), r.need(n * sizeof(double)),
                n * sizeof(double));
  }
  if (!r.done()) throw FormatError("trailing bytes after checkpoint");
  return model;
}

void save_checkpoint(Model& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(model);
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write checkpoint " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
      std::filesystem::remove(tmp);
      throw UsageError("failed writing checkpoint " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_checkpoint(buffer.str());
}

}  // namespace tdtrnn
