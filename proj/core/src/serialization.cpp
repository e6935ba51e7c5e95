#include "mlkfhe/serialization.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>

#include "mlkfhe/text.hpp"

namespace mlkfhe {

namespace {

constexpr std::string_view kMagic = "mlkfhe-model";

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  Writer& operator<<(std::string_view token) {
    if (!line_start_) out_ << ' ';
    out_ << token;
    line_start_ = false;
    return *this;
  }
  Writer& operator<<(double v) { return *this << std::string_view(format_double(v)); }
  Writer& operator<<(std::size_t v) { return *this << std::string_view(std::to_string(v)); }

  Writer& u64(std::uint64_t v) { return *this << std::string_view(std::to_string(v)); }
  Writer& str(std::string_view s) { return *this << std::string_view(escape_token(s)); }

  void endl() {
    out_ << '\n';
    line_start_ = true;
  }

 private:
  std::ostream& out_;
  bool line_start_ = true;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string token() {
    std::string t;
    if (!(in_ >> t)) throw SerializationError("model file ends unexpectedly");
    return t;
  }

  void expect(std::string_view want) {
    const std::string got = token();
    if (got != want) {
      throw SerializationError("model file: expected '" + std::string(want) + "', found '" +
                               got + "'");
    }
  }

  double real() {
    const std::string t = token();
    if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    const auto v = parse_double(t);
    if (!v) throw SerializationError("model file: bad number '" + t + "'");
    return *v;
  }

  std::size_t size() {
    const std::string t = token();
    const auto v = parse_integer(t);
    if (!v || *v < 0) throw SerializationError("model file: bad count '" + t + "'");
    return static_cast<std::size_t>(*v);
  }

  std::uint64_t u64() {
    const std::string t = token();
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
      throw SerializationError("model file: bad seed '" + t + "'");
    }
    return v;
  }

  std::string str() { return unescape_token(token()); }

 private:
  std::istream& in_;
};

// --- writing -------------------------------------------------------------------

void write_vector(Writer& w, const Vector& v) {
  w << static_cast<std::size_t>(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) w << v(i);
}

void write_binary(Writer& w, const BinaryModel& m) {
  if (m.is_constant()) {
    w << "bin-const" << *m.constant_score() << m.input_dim();
    w.endl();
    return;
  }
  const FeatureTransform& t = m.transform();
  w << "bin";
  write_vector(w, t.center);
  write_vector(w, t.scale);
  if (t.rff) {
    w << "rff" << t.rff->output_dim() << t.rff->gamma();
    w.u64(t.rff->seed());
  } else {
    w << "norff";
  }
  write_vector(w, m.coefficients());
  w << m.bias();
  w.endl();
}

void write_component(Writer& w, const Component& c) {
  std::visit(overloaded{
                 [&](const HomerTree& tree) {
                   w << "homer" << tree.nodes.size() << tree.input_dim << tree.num_labels;
                   w.endl();
                   for (const auto& node : tree.nodes) {
                     w << "node" << node.num_instances << node.labels.size();
                     for (auto l : node.labels) w << l;
                     w << node.children.size();
                     for (auto ch : node.children) w << ch;
                     w.endl();
                     for (const auto& m : node.meta_models) write_binary(w, m);
                   }
                 },
                 [&](const ChainModel& chain) {
                   w << "chain" << chain.input_dim << chain.order.size();
                   for (auto l : chain.order) w << l;
                   w.endl();
                   for (const auto& m : chain.models) write_binary(w, m);
                 },
                 [&](const BinaryRelevanceModel& br) {
                   w << "br" << br.input_dim << br.models.size();
                   w.endl();
                   for (const auto& m : br.models) write_binary(w, m);
                 },
                 [&](const ConstantModel& constant) {
                   w << "constant" << constant.input_dim;
                   write_vector(w, constant.scores);
                   w.endl();
                 }},
             c);
}

void write_draw(Writer& w, const ComponentDraw& d) {
  w << "draw" << to_string(d.family) << to_string(d.kernel) << to_string(d.clustering) << d.k
    << d.order.size();
  for (auto l : d.order) w << l;
  w.u64(d.seed);
  w.endl();
}

void write_spec(Writer& w, const AlgorithmSpec& s) {
  w << "spec";
  w.str(s.name);
  w << to_string(s.kind) << s.components << to_string(s.weighting) << s.sample_fraction
    << to_string(s.base.kernel) << s.base.lambda << s.base.rff_dim << s.base.rff_gamma
    << s.base.max_epochs << s.base.step_decay << s.base.tolerance << to_string(s.clustering)
    << s.k;
  w.endl();
}

// --- reading -------------------------------------------------------------------

Vector read_vector(Reader& r) {
  const std::size_t n = r.size();
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = r.real();
  return v;
}

std::vector<std::size_t> read_indices(Reader& r) {
  std::vector<std::size_t> out(r.size());
  for (auto& x : out) x = r.size();
  return out;
}

BinaryModel read_binary(Reader& r) {
  const std::string tag = r.token();
  if (tag == "bin-const") {
    const double score = r.real();
    return BinaryModel::constant(score, r.size());
  }
  if (tag != "bin") throw SerializationError("model file: expected a binary model, found '" + tag + "'");
  FeatureTransform t;
  t.center = read_vector(r);
  t.scale = read_vector(r);
  if (t.center.size() != t.scale.size()) throw SerializationError("model file: transform size mismatch");
  const std::string rff = r.token();
  if (rff == "rff") {
    const std::size_t out_dim = r.size();
    const double gamma = r.real();
    const std::uint64_t seed = r.u64();
    t.rff.emplace(t.input_dim(), out_dim, gamma, seed);
  } else if (rff != "norff") {
    throw SerializationError("model file: bad feature map tag '" + rff + "'");
  }
  Vector coef = read_vector(r);
  if (static_cast<std::size_t>(coef.size()) != t.output_dim()) {
    throw SerializationError("model file: coefficient count mismatch");
  }
  const double bias = r.real();
  return BinaryModel(std::move(t), std::move(coef), bias);
}

Component read_component(Reader& r) {
  const std::string tag = r.token();
  if (tag == "homer") {
    HomerTree tree;
    const std::size_t nodes = r.size();
    tree.input_dim = r.size();
    tree.num_labels = r.size();
    for (std::size_t v = 0; v < nodes; ++v) {
      r.expect("node");
      HomerNode node;
      node.num_instances = r.size();
      node.labels = read_indices(r);
      node.children = read_indices(r);
      for (std::size_t c = 0; c < node.children.size(); ++c) {
        node.meta_models.push_back(read_binary(r));
      }
      tree.nodes.push_back(std::move(node));
    }
    try {
      check_homer_structure(tree);
    } catch (const std::logic_error& e) {
      throw SerializationError(std::string("model file: ") + e.what());
    }
    return tree;
  }
  if (tag == "chain") {
    ChainModel chain;
    chain.input_dim = r.size();
    chain.order = read_indices(r);
    validate_permutation(chain.order, chain.order.size());
    for (std::size_t l = 0; l < chain.order.size(); ++l) chain.models.push_back(read_binary(r));
    return chain;
  }
  if (tag == "br") {
    BinaryRelevanceModel br;
    br.input_dim = r.size();
    const std::size_t q = r.size();
    for (std::size_t j = 0; j < q; ++j) br.models.push_back(read_binary(r));
    return br;
  }
  if (tag == "constant") {
    ConstantModel constant;
    constant.input_dim = r.size();
    constant.scores = read_vector(r);
    return constant;
  }
  throw SerializationError("model file: unknown component '" + tag + "'");
}

ComponentDraw read_draw(Reader& r) {
  r.expect("draw");
  ComponentDraw d;
  d.family = parse_family(r.token());
  d.kernel = parse_kernel(r.token());
  d.clustering = parse_clustering(r.token());
  d.k = r.size();
  d.order = read_indices(r);
  d.seed = r.u64();
  return d;
}

AlgorithmSpec read_spec(Reader& r) {
  r.expect("spec");
  AlgorithmSpec s;
  s.name = r.str();
  s.kind = parse_algorithm_kind(r.token());
  s.components = r.size();
  s.weighting = parse_weighting(r.token());
  s.sample_fraction = r.real();
  s.base.kernel = parse_kernel(r.token());
  s.base.lambda = r.real();
  s.base.rff_dim = r.size();
  s.base.rff_gamma = r.real();
  s.base.max_epochs = r.size();
  s.base.step_decay = r.real();
  s.base.tolerance = r.real();
  s.clustering = parse_clustering(r.token());
  s.k = r.size();
  return s;
}

}  // namespace

std::string escape_token(std::string_view text) {
  if (text.empty()) return "%e";
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (c <= 0x20 || c >= 0x7f || c == '%') {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string unescape_token(std::string_view token) {
  if (token == "%e") return {};
  std::string out;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] != '%') {
      out += token[i];
      continue;
    }
    if (i + 2 >= token.size()) {
      throw SerializationError("model file: truncated escape in '" + std::string(token) + "'");
    }
    unsigned value = 0;
    const auto res = std::from_chars(token.data() + i + 1, token.data() + i + 3, value, 16);
    if (res.ec != std::errc{} || res.ptr != token.data() + i + 3) {
      throw SerializationError("model file: bad escape in '" + std::string(token) + "'");
    }
    out += static_cast<char>(value);
    i += 2;
  }
  return out;
}

void save_model(const TrainedAlgorithm& model, std::ostream& out,
                const std::vector<std::string>& header) {
  for (const auto& line : header) out << "# " << line << '\n';
  Writer w(out);
  w << kMagic << static_cast<std::size_t>(kModelFormatVersion);
  w.endl();
  write_spec(w, model.spec);
  w << "seed";
  w.u64(model.seed);
  w.endl();
  w << "input_dim" << model.input_dim;
  w.endl();
  w << "labels" << model.label_names.size();
  for (const auto& name : model.label_names) w.str(name);
  w.endl();
  w << "log" << model.log.size();
  w.endl();
  for (const auto& it : model.log) {
    w << it.t << it.model_noise << it.model_gain << it.model_variance << it.weight_gain
      << it.weight_variance;
    w.endl();
  }

  std::visit(overloaded{
                 [&](const KfheModel& m) {
                   w << "kfhe" << to_string(m.family);
                   w.u64(m.seed);
                   w << m.input_dim << m.num_labels << m.components.size();
                   w.endl();
                   write_draw(w, m.initial_draw);
                   write_component(w, m.initial);
                   for (std::size_t t = 0; t < m.components.size(); ++t) {
                     w << "gain" << m.gains[t];
                     w.endl();
                     write_draw(w, m.draws[t]);
                     write_component(w, m.components[t]);
                   }
                 },
                 [&](const BaggedModel& m) {
                   w << "bagged" << to_string(m.family);
                   w.u64(m.seed);
                   w << m.input_dim << m.num_labels << m.components.size();
                   w.endl();
                   for (std::size_t t = 0; t < m.components.size(); ++t) {
                     write_draw(w, m.draws[t]);
                     write_component(w, m.components[t]);
                   }
                 },
                 [&](const Component& c) {
                   w << "single";
                   w.endl();
                   write_component(w, c);
                 }},
             model.model);
  w << "end";
  w.endl();
}

void save_model(const TrainedAlgorithm& model, const std::filesystem::path& path,
                const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw SerializationError("cannot write model file " + path.string());
  save_model(model, out, header);
  if (!out) throw SerializationError("error writing model file " + path.string());
}

TrainedAlgorithm load_model(std::istream& in) {
  while (in.peek() == '#') {
    std::string skip;
    std::getline(in, skip);
  }
  Reader r(in);
  r.expect(kMagic);
  const std::size_t version = r.size();
  if (version != static_cast<std::size_t>(kModelFormatVersion)) {
    throw SerializationError("unsupported model format version " + std::to_string(version));
  }
  TrainedAlgorithm out;
  try {
    out.spec = read_spec(r);
    r.expect("seed");
    out.seed = r.u64();
    r.expect("input_dim");
    out.input_dim = r.size();
    r.expect("labels");
    out.label_names.resize(r.size());
    for (auto& name : out.label_names) name = r.str();
    r.expect("log");
    out.log.resize(r.size());
    for (auto& it : out.log) {
      it.t = r.size();
      it.model_noise = r.real();
      it.model_gain = r.real();
      it.model_variance = r.real();
      it.weight_gain = r.real();
      it.weight_variance = r.real();
    }

    const std::string kind = r.token();
    if (kind == "kfhe") {
      KfheModel m;
      m.family = parse_family(r.token());
      m.seed = r.u64();
      m.input_dim = r.size();
      m.num_labels = r.size();
      const std::size_t count = r.size();
      m.initial_draw = read_draw(r);
      m.initial = read_component(r);
      for (std::size_t t = 0; t < count; ++t) {
        r.expect("gain");
        m.gains.push_back(r.real());
        m.draws.push_back(read_draw(r));
        m.components.push_back(read_component(r));
      }
      out.model = std::move(m);
    } else if (kind == "bagged") {
      BaggedModel m;
      m.family = parse_family(r.token());
      m.seed = r.u64();
      m.input_dim = r.size();
      m.num_labels = r.size();
      const std::size_t count = r.size();
      for (std::size_t t = 0; t < count; ++t) {
        m.draws.push_back(read_draw(r));
        m.components.push_back(read_component(r));
      }
      out.model = std::move(m);
    } else if (kind == "single") {
      out.model = read_component(r);
    } else {
      throw SerializationError("model file: unknown model kind '" + kind + "'");
    }
    r.expect("end");
  } catch (const std::invalid_argument& e) {
    throw SerializationError(std::string("model file: ") + e.what());
  }
  if (model_input_dim(out.model) != out.input_dim ||
      model_num_labels(out.model) != out.label_names.size()) {
    throw SerializationError("model file: dimensions are inconsistent");
  }
  return out;
}

TrainedAlgorithm load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SerializationError("cannot open model file " + path.string());
  return load_model(in);
}

}  // namespace mlkfhe
