// Multi-label needs classifier: three BiLSTM encoders (sentence, context,
// knowledge paths), self-attention pooling over sentence and context,
// sentence-conditioned attention over path encodings, gated fusion, and a
// sigmoid output layer trained with weighted binary cross entropy under an
// adaptive-moment optimizer. Deterministic given the seed; 64-bit throughout.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "needpaths/autodiff.hpp"
#include "needpaths/common.hpp"
#include "needpaths/embeddings.hpp"
#include "needpaths/linking.hpp"
#include "needpaths/paths.hpp"
#include "needpaths/ranking.hpp"
#include "needpaths/text.hpp"

namespace needpaths {

struct ModelConfig {
  std::size_t hidden_size = 100;    // H: LSTM hidden units per direction
  std::size_t gate_size = 100;      // d_g: dense/gate layer width
  std::size_t embedding_dim = 100;  // D: word embedding width
  std::vector<std::string> labels;  // active label names, fixed order
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  double dropout = 0.5;
  double l2 = 0.01;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  int k = 3;  // paths consumed per endpoint group
  double threshold = 0.5;

  std::size_t label_count() const { return labels.size(); }

  void validate() const {
    if (hidden_size == 0 || gate_size == 0 || embedding_dim == 0) {
      throw config_error("model sizes must be positive");
    }
    if (labels.empty()) throw config_error("model requires at least one label");
    if (learning_rate <= 0.0) throw config_error("learning rate must be positive");
    if (batch_size == 0) throw config_error("batch size must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw config_error("dropout must be in [0,1)");
    if (l2 < 0.0) throw config_error("L2 coefficient must be non-negative");
    if (epochs == 0) throw config_error("epochs must be positive");
    if (k <= 0) throw config_error("k (paths per endpoint) must be positive");
    if (threshold <= 0.0 || threshold >= 1.0) throw config_error("threshold must be in (0,1)");
  }
};

// Optimizer constants (standard first/second-moment update, bias-corrected).
namespace adam {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;
}  // namespace adam

struct ModelParams {
  ModelConfig config;
  std::vector<Tensor> tensors;                 // canonical order
  std::map<std::string, std::size_t> by_name;  // name -> index

  Tensor& get(const std::string& name) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw data_error("unknown parameter tensor: " + name);
    return tensors[it->second];
  }
  const Tensor& get(const std::string& name) const {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw data_error("unknown parameter tensor: " + name);
    return tensors[it->second];
  }

  void zero_grads() {
    for (auto& t : tensors) t.zero_grad();
  }

  bool finite() const {
    for (const auto& t : tensors) {
      for (double v : t.value) {
        if (!std::isfinite(v)) return false;
      }
    }
    return true;
  }

  // Builds all tensors in canonical order and initializes each uniformly in
  // [-1/sqrt(fan_in), +1/sqrt(fan_in)], drawing in tensor order then row-major
  // element order. Biases use their layer's fan-in.
  static ModelParams init(const ModelConfig& config, std::mt19937_64& rng) {
    config.validate();
    ModelParams p;
    p.config = config;
    const std::size_t H = config.hidden_size;
    const std::size_t G = config.gate_size;
    const std::size_t D = config.embedding_dim;
    const std::size_t Z = config.label_count();

    auto add = [&](const std::string& name, std::size_t rows, std::size_t cols,
                   std::size_t fan_in) {
      Tensor t(name, rows, cols);
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (auto& v : t.value) v = uniform_range(rng, -bound, bound);
      p.by_name.emplace(name, p.tensors.size());
      p.tensors.push_back(std::move(t));
    };

    for (const char* enc : {"s", "cxt", "k"}) {
      for (const char* dir : {"fwd", "bwd"}) {
        std::string base = std::string("lstm_") + enc + "_" + dir + "_";
        add(base + "W", 4 * H, D, D);      // input weights, gates packed i,f,g,o
        add(base + "U", 4 * H, H, H);      // recurrent weights
        add(base + "b", 4 * H, 1, D + H);  // gate biases
      }
    }
    for (const char* ch : {"s", "cxt"}) {
      std::string base = std::string("attn_") + ch + "_";
      add(base + "W", G, 2 * H, 2 * H);
      add(base + "b", G, 1, 2 * H);
      add(base + "v_w", 1, G, G);
      add(base + "v_b", 1, 1, G);
    }
    add("knowledge_W", G, 2 * H, 2 * H);
    add("knowledge_b", G, 1, 2 * H);
    add("joint_W", G, 4 * H, 4 * H);
    add("joint_b", G, 1, 4 * H);
    add("fusion_W", G, 4 * H + G, 4 * H + G);
    add("fusion_b", G, 1, 4 * H + G);
    add("output_W", Z, G, G);
    add("output_b", Z, 1, G);
    return p;
  }

  // --- binary container: magic, version, config block, named tensors --------

  static constexpr char kMagic[4] = {'N', 'P', 'M', 'D'};
  static constexpr std::uint32_t kFormatVersion = 1;

  void save(std::ostream& out) const {
    out.write(kMagic, 4);
    detail::write_u32(out, kFormatVersion);
    detail::write_u64(out, config.hidden_size);
    detail::write_u64(out, config.gate_size);
    detail::write_u64(out, config.embedding_dim);
    detail::write_u64(out, config.labels.size());
    for (const auto& l : config.labels) detail::write_str(out, l);
    detail::write_f64(out, config.learning_rate);
    detail::write_u64(out, config.batch_size);
    detail::write_f64(out, config.dropout);
    detail::write_f64(out, config.l2);
    detail::write_u64(out, config.epochs);
    detail::write_u64(out, config.seed);
    detail::write_u64(out, static_cast<std::uint64_t>(config.k));
    detail::write_f64(out, config.threshold);
    detail::write_u64(out, tensors.size());
    for (const auto& t : tensors) {
      detail::write_str(out, t.name);
      detail::write_u64(out, t.rows);
      detail::write_u64(out, t.cols);
      for (double v : t.value) detail::write_f64(out, v);
    }
    if (!out) throw data_error("failed writing model file");
  }

  void save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open model file for writing: " + path);
    save(out);
  }

  static ModelParams load(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != std::string(kMagic, 4)) {
      throw data_error("not a model file (bad magic)");
    }
    std::uint32_t version = detail::read_u32(in);
    if (version != kFormatVersion) {
      throw data_error("unsupported model format version " + std::to_string(version));
    }
    ModelParams p;
    p.config.hidden_size = detail::read_u64(in);
    p.config.gate_size = detail::read_u64(in);
    p.config.embedding_dim = detail::read_u64(in);
    std::uint64_t n_labels = detail::read_u64(in);
    for (std::uint64_t i = 0; i < n_labels; ++i) p.config.labels.push_back(detail::read_str(in));
    p.config.learning_rate = detail::read_f64(in);
    p.config.batch_size = detail::read_u64(in);
    p.config.dropout = detail::read_f64(in);
    p.config.l2 = detail::read_f64(in);
    p.config.epochs = detail::read_u64(in);
    p.config.seed = detail::read_u64(in);
    p.config.k = static_cast<int>(detail::read_u64(in));
    p.config.threshold = detail::read_f64(in);
    std::uint64_t n_tensors = detail::read_u64(in);
    for (std::uint64_t i = 0; i < n_tensors; ++i) {
      std::string name = detail::read_str(in);
      std::uint64_t rows = detail::read_u64(in);
      std::uint64_t cols = detail::read_u64(in);
      Tensor t(name, rows, cols);
      for (auto& v : t.value) v = detail::read_f64(in);
      p.by_name.emplace(name, p.tensors.size());
      p.tensors.push_back(std::move(t));
    }
    if (!in) throw data_error("truncated model file");
    p.check_shapes();
    return p;
  }

  static ModelParams load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open model file: " + path);
    return load(in);
  }

  // Shape consistency with the config; violations are configuration errors
  // raised at load time, never mid-forward.
  void check_shapes() const {
    config.validate();
    std::mt19937_64 dummy(0);
    ModelParams expect = ModelParams::init(config, dummy);
    if (expect.tensors.size() != tensors.size()) {
      throw config_error("model file tensor count does not match its config");
    }
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      if (tensors[i].name != expect.tensors[i].name ||
          tensors[i].rows != expect.tensors[i].rows ||
          tensors[i].cols != expect.tensors[i].cols) {
        throw config_error("model file tensor " + tensors[i].name +
                           " has a shape inconsistent with its config");
      }
    }
  }
};

// Attention distributions and probabilities captured during a forward pass.
struct ForwardTrace {
  std::vector<double> sentence_weights;
  std::vector<double> context_weights;  // empty when context is empty
  std::vector<double> path_weights;     // empty when the path list is empty
  std::vector<double> probabilities;    // aligned with config.labels
};

struct Prediction {
  std::string instance_id;
  std::vector<double> probabilities;  // aligned with config.labels
  std::vector<bool> decisions;        // probability >= threshold
};

namespace detail {

struct EncoderVars {
  Tensor *w_fwd, *u_fwd, *b_fwd, *w_bwd, *u_bwd, *b_bwd;
};

inline EncoderVars encoder_vars(ModelParams& params, const std::string& enc) {
  std::string base = "lstm_" + enc + "_";
  return {&params.get(base + "fwd_W"), &params.get(base + "fwd_U"), &params.get(base + "fwd_b"),
          &params.get(base + "bwd_W"), &params.get(base + "bwd_U"), &params.get(base + "bwd_b")};
}

// One LSTM direction over the input sequence; gates packed (i, f, g, o).
inline std::vector<Var> lstm_direction(Tape& tape, Tensor& W, Tensor& U, Tensor& b,
                                       const std::vector<Var>& inputs, std::size_t H,
                                       bool reverse) {
  std::vector<Var> states(inputs.size());
  Var h = tape.zeros(H);
  Var c = tape.zeros(H);
  for (std::size_t step = 0; step < inputs.size(); ++step) {
    std::size_t t = reverse ? inputs.size() - 1 - step : step;
    Var pre = tape.add(tape.add(tape.matvec(W, inputs[t]), tape.matvec(U, h)), tape.param(b));
    Var i = tape.sigmoid(tape.slice(pre, 0, H));
    Var f = tape.sigmoid(tape.slice(pre, H, H));
    Var g = tape.tanh_(tape.slice(pre, 2 * H, H));
    Var o = tape.sigmoid(tape.slice(pre, 3 * H, H));
    c = tape.add(tape.hadamard(f, c), tape.hadamard(i, g));
    h = tape.hadamard(o, tape.tanh_(c));
    states[t] = h;
  }
  return states;
}

}  // namespace detail

struct EncodedSequence {
  std::vector<Var> states;  // per position, size 2H (forward; backward)
  Var final_rep;            // [forward final; backward final], size 2H
};

// BiLSTM over embedded tokens: per-position states concatenate the two
// directions; the final representation concatenates the forward state at the
// last position with the backward state at the first.
inline EncodedSequence encode_sequence(Tape& tape, ModelParams& params, const std::string& encoder,
                                       const std::vector<Var>& inputs) {
  if (inputs.empty()) throw data_error("encode_sequence requires a non-empty sequence");
  const std::size_t H = params.config.hidden_size;
  auto vars = detail::encoder_vars(params, encoder);
  auto fwd = detail::lstm_direction(tape, *vars.w_fwd, *vars.u_fwd, *vars.b_fwd, inputs, H, false);
  auto bwd = detail::lstm_direction(tape, *vars.w_bwd, *vars.u_bwd, *vars.b_bwd, inputs, H, true);
  EncodedSequence out;
  out.states.reserve(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    out.states.push_back(tape.concat({fwd[t], bwd[t]}));
  }
  out.final_rep = tape.concat({fwd.back(), bwd.front()});
  return out;
}

struct AttentionResult {
  Var pooled;   // size 2H
  Var weights;  // size N, non-negative, sums to 1
};

// Token-level attention pooling: a_i = ReLU(W h_i + b); scalar v_i = W_v a_i
// + b_v; sigmoid then sum-normalize; pooled = sum of weighted states.
inline AttentionResult self_attention(Tape& tape, ModelParams& params, const std::string& channel,
                                      const std::vector<Var>& states) {
  if (states.empty()) throw data_error("self_attention requires at least one state");
  std::string base = "attn_" + channel + "_";
  Tensor& W = params.get(base + "W");
  Tensor& b = params.get(base + "b");
  Tensor& vw = params.get(base + "v_w");
  Tensor& vb = params.get(base + "v_b");
  std::vector<Var> scores;
  scores.reserve(states.size());
  for (Var h : states) {
    Var a = tape.relu(tape.affine(W, b, h));
    scores.push_back(tape.affine(vw, vb, a));
  }
  Var weights = tape.normalize_sum(tape.sigmoid(tape.stack_scalars(scores)));
  return {tape.weighted_sum(states, weights), weights};
}

// One knowledge-BiLSTM encoding (final representation) per path token
// sequence.
inline std::vector<Var> encode_paths(Tape& tape, ModelParams& params,
                                     const std::vector<std::vector<Var>>& path_inputs) {
  std::vector<Var> out;
  out.reserve(path_inputs.size());
  for (const auto& inputs : path_inputs) {
    out.push_back(encode_sequence(tape, params, "k", inputs).final_rep);
  }
  return out;
}

// Sentence-conditioned attention over path encodings: sigmoid of the dot
// product with the sentence vector, sum-normalized; the weighted sum passes
// through a ReLU layer to size d_g.
inline AttentionResult knowledge_attention(Tape& tape, ModelParams& params, Var sentence_vec,
                                           const std::vector<Var>& path_encodings) {
  if (path_encodings.empty()) {
    throw data_error("knowledge_attention requires at least one path encoding");
  }
  std::vector<Var> dots;
  dots.reserve(path_encodings.size());
  for (Var h : path_encodings) dots.push_back(tape.dot(sentence_vec, h));
  Var weights = tape.normalize_sum(tape.sigmoid(tape.stack_scalars(dots)));
  Var pooled = tape.weighted_sum(path_encodings, weights);
  Var xk = tape.relu(tape.affine(params.get("knowledge_W"), params.get("knowledge_b"), pooled));
  return {xk, weights};
}

// Embedded, optionally dropout-masked inputs for one instance.
struct InstanceInputs {
  std::vector<std::vector<double>> sentence;             // non-empty
  std::vector<std::vector<double>> context;              // may be empty
  std::vector<std::vector<std::vector<double>>> paths;   // may be empty
};

// Tokens fed to the knowledge encoder for one path: concept words
// (underscores split) alternating with relation words (camel case split);
// direction marks are not rendered.
inline std::vector<std::string> path_token_sequence(const KnowledgePath& path) {
  std::vector<std::string> relations;
  relations.reserve(path.hops.size());
  for (const auto& h : path.hops) relations.push_back(h.relation);
  return path_to_tokens(path.concepts, relations);
}

// Sentence tokens with the character name appended as final tokens.
inline std::vector<std::string> sentence_with_character(const Instance& instance) {
  std::vector<std::string> tokens = instance.sentence_tokens;
  std::istringstream chars(instance.character);
  std::string word;
  while (chars >> word) tokens.push_back(word);
  return tokens;
}

// The ranked paths an instance's classifier consumes: up to k per endpoint
// group, in file order (c-z groups before c-c groups, then group order).
inline std::vector<KnowledgePath> model_paths(const RankedPathList& list, int k) {
  std::vector<KnowledgePath> out;
  for (const auto& g : list.groups) {
    int taken = 0;
    for (const auto& p : g.paths) {
      if (taken >= k) break;
      out.push_back(p);
      ++taken;
    }
  }
  return out;
}

inline InstanceInputs embed_instance(const Instance& instance, const RankedPathList* paths,
                                     const EmbeddingTable& table, int k) {
  InstanceInputs in;
  in.sentence = table.embed(sentence_with_character(instance));
  in.context = table.embed(instance.context_tokens());
  if (paths) {
    for (const auto& p : model_paths(*paths, k)) {
      in.paths.push_back(table.embed(path_token_sequence(p)));
    }
  }
  return in;
}

struct ForwardResult {
  Var probabilities;
  ForwardTrace trace;
};

// Full forward pass. Empty context contributes a zero context vector; an
// empty path list contributes a zero knowledge vector, which reduces the
// model to its knowledge-free baseline exactly.
inline ForwardResult forward(Tape& tape, ModelParams& params, const InstanceInputs& inputs) {
  const std::size_t H = params.config.hidden_size;
  const std::size_t G = params.config.gate_size;
  if (inputs.sentence.empty()) throw data_error("forward requires a non-empty sentence");
  if (params.config.embedding_dim != inputs.sentence.front().size()) {
    throw config_error("embedding dimension does not match the model config");
  }

  auto to_vars = [&](const std::vector<std::vector<double>>& seq) {
    std::vector<Var> vars;
    vars.reserve(seq.size());
    for (const auto& e : seq) vars.push_back(tape.constant(e));
    return vars;
  };

  ForwardResult result;

  auto sent = encode_sequence(tape, params, "s", to_vars(inputs.sentence));
  auto sent_attn = self_attention(tape, params, "s", sent.states);
  result.trace.sentence_weights = tape.value(sent_attn.weights);

  Var x_cxt;
  if (inputs.context.empty()) {
    x_cxt = tape.zeros(2 * H);
  } else {
    auto cxt = encode_sequence(tape, params, "cxt", to_vars(inputs.context));
    auto cxt_attn = self_attention(tape, params, "cxt", cxt.states);
    result.trace.context_weights = tape.value(cxt_attn.weights);
    x_cxt = cxt_attn.pooled;
  }

  Var x_k;
  if (inputs.paths.empty()) {
    x_k = tape.zeros(G);
  } else {
    std::vector<std::vector<Var>> path_inputs;
    path_inputs.reserve(inputs.paths.size());
    for (const auto& p : inputs.paths) path_inputs.push_back(to_vars(p));
    auto encodings = encode_paths(tape, params, path_inputs);
    auto know = knowledge_attention(tape, params, sent_attn.pooled, encodings);
    result.trace.path_weights = tape.value(know.weights);
    x_k = know.pooled;
  }

  Var joint = tape.concat({sent_attn.pooled, x_cxt});
  Var y = tape.relu(tape.affine(params.get("joint_W"), params.get("joint_b"), joint));
  Var fused_in = tape.concat({sent_attn.pooled, x_cxt, x_k});
  Var o = tape.relu(tape.affine(params.get("fusion_W"), params.get("fusion_b"), fused_in));
  Var gated = tape.add(tape.hadamard(o, y), tape.hadamard(o, x_k));
  result.probabilities =
      tape.sigmoid(tape.affine(params.get("output_W"), params.get("output_b"), gated));
  result.trace.probabilities = tape.value(result.probabilities);
  return result;
}

// Per-label positive weights: w_z = 1 / (1 - exp(-sqrt(P_z))) with the
// positive fraction P_z clamped to [1e-6, 1-1e-6].
inline std::vector<double> class_weights(const std::vector<Instance>& instances,
                                         const LabelSet& label_set) {
  if (instances.empty()) throw data_error("class weights require at least one instance");
  std::vector<double> weights(label_set.labels.size(), 0.0);
  for (std::size_t z = 0; z < label_set.labels.size(); ++z) {
    const std::string& label = label_set.labels[z];
    std::size_t positives = 0;
    for (const auto& inst : instances) {
      if (std::find(inst.gold_labels.begin(), inst.gold_labels.end(), label) !=
          inst.gold_labels.end()) {
        ++positives;
      }
    }
    double p = static_cast<double>(positives) / static_cast<double>(instances.size());
    p = std::min(std::max(p, 1e-6), 1.0 - 1e-6);
    weights[z] = 1.0 / (1.0 - std::exp(-std::sqrt(p)));
  }
  return weights;
}

inline std::vector<double> gold_bitvector(const Instance& instance, const LabelSet& label_set) {
  std::vector<double> gold(label_set.labels.size(), 0.0);
  for (const auto& l : instance.gold_labels) gold[label_set.index_of(l)] = 1.0;
  return gold;
}

// Adaptive-moment optimizer with bias correction. L2 regularization enters
// through the gradient (2 * lambda * theta) before the moment update.
class AdamOptimizer {
 public:
  AdamOptimizer(ModelParams& params, double learning_rate, double l2)
      : params_(params), lr_(learning_rate), l2_(l2) {
    for (const auto& t : params.tensors) {
      m_.emplace_back(t.size(), 0.0);
      v_.emplace_back(t.size(), 0.0);
    }
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(adam::kBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(adam::kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.tensors.size(); ++i) {
      Tensor& tensor = params_.tensors[i];
      auto& m = m_[i];
      auto& v = v_[i];
      for (std::size_t j = 0; j < tensor.size(); ++j) {
        double g = tensor.grad[j] + 2.0 * l2_ * tensor.value[j];
        m[j] = adam::kBeta1 * m[j] + (1.0 - adam::kBeta1) * g;
        v[j] = adam::kBeta2 * v[j] + (1.0 - adam::kBeta2) * g * g;
        const double mhat = m[j] / bc1;
        const double vhat = v[j] / bc2;
        tensor.value[j] -= lr_ * mhat / (std::sqrt(vhat) + adam::kEpsilon);
      }
    }
  }

 private:
  ModelParams& params_;
  double lr_, l2_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

namespace detail {

// Inverted dropout applied in place; mask order: tokens in sequence order,
// coordinates within each token.
inline void apply_dropout(std::vector<std::vector<double>>& seq, double rate,
                          std::mt19937_64& rng) {
  const double keep_scale = 1.0 / (1.0 - rate);
  for (auto& vec : seq) {
    for (auto& x : vec) {
      if (uniform_unit(rng) < rate) {
        x = 0.0;
      } else {
        x *= keep_scale;
      }
    }
  }
}

}  // namespace detail

// Aligns ranked-path lists to instances by instance_id; instances without an
// entry get a null (no paths).
inline std::vector<const RankedPathList*> align_paths(const std::vector<Instance>& instances,
                                                      const std::vector<RankedPathList>& paths) {
  std::map<std::string, const RankedPathList*> by_id;
  for (const auto& l : paths) {
    if (!by_id.emplace(l.instance_id, &l).second) {
      throw data_error("duplicate ranked-path entry for instance " + l.instance_id);
    }
  }
  std::vector<const RankedPathList*> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    auto it = by_id.find(inst.instance_id);
    out.push_back(it == by_id.end() ? nullptr : it->second);
  }
  return out;
}

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_log;  // mean training loss per epoch
};

// Mini-batch training. One seeded generator drives parameter initialization,
// per-epoch shuffling, and dropout masks, in that order, so identical seeds
// give bit-identical trajectories. Single-threaded by contract. The optional
// hook observes (epoch, mean loss, params) after each epoch, e.g. for
// held-out evaluation; it must not mutate the params.
using EpochHook = std::function<void(std::size_t, double, ModelParams&)>;

inline TrainResult train(const ModelConfig& config, const LabelSet& label_set,
                         const std::vector<Instance>& instances,
                         const std::vector<RankedPathList>& ranked_paths,
                         const EmbeddingTable& table, const EpochHook& on_epoch = {}) {
  config.validate();
  if (instances.empty()) throw data_error("training requires a non-empty instance set");
  if (label_set.labels != config.labels) {
    throw config_error("model label order does not match the active label set");
  }

  std::mt19937_64 rng(config.seed);
  TrainResult result{ModelParams::init(config, rng), {}};
  ModelParams& params = result.params;

  const std::vector<double> weights = class_weights(instances, label_set);
  auto paths_by_instance = align_paths(instances, ranked_paths);

  std::vector<std::vector<double>> golds;
  golds.reserve(instances.size());
  for (const auto& inst : instances) golds.push_back(gold_bitvector(inst, label_set));

  AdamOptimizer optimizer(params, config.learning_rate, config.l2);
  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Tape tape;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    fisher_yates(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double batch_n = static_cast<double>(end - start);
      params.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t bi = start; bi < end; ++bi) {
        const std::size_t idx = order[bi];
        InstanceInputs inputs =
            embed_instance(instances[idx], paths_by_instance[idx], table, config.k);
        if (config.dropout > 0.0) {
          detail::apply_dropout(inputs.sentence, config.dropout, rng);
          detail::apply_dropout(inputs.context, config.dropout, rng);
          for (auto& p : inputs.paths) detail::apply_dropout(p, config.dropout, rng);
        }
        tape.clear();
        ForwardResult fw = forward(tape, params, inputs);
        Var loss = tape.weighted_bce(fw.probabilities, golds[idx], weights);
        const double loss_value = tape.value(loss)[0];
        if (!std::isfinite(loss_value)) {
          throw data_error("training aborted: non-finite loss at epoch " +
                           std::to_string(epoch + 1) + ", batch " +
                           std::to_string(start / config.batch_size + 1) + ", instance " +
                           instances[idx].instance_id);
        }
        batch_loss += loss_value;
        tape.backward(loss, 1.0 / batch_n);
      }
      optimizer.step();
      epoch_loss += batch_loss;
    }
    const double mean_loss = epoch_loss / static_cast<double>(instances.size());
    result.loss_log.push_back(mean_loss);
    if (on_epoch) on_epoch(epoch + 1, mean_loss, params);
  }
  if (!params.finite()) throw data_error("training produced non-finite parameters");
  return result;
}

struct PredictResult {
  Prediction prediction;
  ForwardTrace trace;
};

// Dropout-free forward pass with thresholded decisions (probability >=
// threshold counts as positive).
inline PredictResult predict(ModelParams& params, const Instance& instance,
                             const RankedPathList* paths, const EmbeddingTable& table) {
  InstanceInputs inputs = embed_instance(instance, paths, table, params.config.k);
  Tape tape;
  ForwardResult fw = forward(tape, params, inputs);
  PredictResult out;
  out.trace = fw.trace;
  out.prediction.instance_id = instance.instance_id;
  out.prediction.probabilities = fw.trace.probabilities;
  out.prediction.decisions.reserve(fw.trace.probabilities.size());
  for (double p : fw.trace.probabilities) {
    out.prediction.decisions.push_back(p >= params.config.threshold);
  }
  return out;
}

}  // namespace needpaths
