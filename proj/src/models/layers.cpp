#include "kiwi/models/layers.hpp"

#include "kiwi/common.hpp"

namespace kiwi::models {

using numerics::make_parameter;
using numerics::make_tensor;

std::string task_name(WordTask task) {
  switch (task) {
    case WordTask::Mt: return "mt";
    case WordTask::Gaps: return "gaps";
    case WordTask::Source: return "source";
  }
  return "mt";
}

WordTask parse_task(const std::string& name) {
  if (name == "mt") return WordTask::Mt;
  if (name == "gaps") return WordTask::Gaps;
  if (name == "source") return WordTask::Source;
  throw ConfigError("unknown task '" + name + "' (expected mt, gaps or source)");
}

std::string direction_name(Direction d) {
  return d == Direction::SrcToMt ? "src2mt" : "mt2src";
}

Direction parse_direction(const std::string& name) {
  if (name == "src2mt") return Direction::SrcToMt;
  if (name == "mt2src") return Direction::MtToSrc;
  throw ConfigError("unknown direction '" + name +
                    "' (expected src2mt or mt2src)");
}

Linear::Linear(const std::string& name, size_t in, size_t out,
               UniformSampler& rng) {
  W = make_parameter(name + ".W", {in, out}, in, rng);
  b = make_parameter(name + ".b", {out}, in, rng);
}

TensorPtr Linear::operator()(Graph& g, TensorPtr x) const {
  return g.add_row(g.matmul(std::move(x), W), b);
}

void Linear::collect(std::vector<TensorPtr>& out) const {
  out.push_back(W);
  out.push_back(b);
}

LstmCell::LstmCell(const std::string& name, size_t in, size_t hidden_dim,
                   UniformSampler& rng)
    : hidden(hidden_dim) {
  Wx = make_parameter(name + ".Wx", {in, 4 * hidden}, in, rng);
  Wh = make_parameter(name + ".Wh", {hidden, 4 * hidden}, hidden, rng);
  b = make_parameter(name + ".b", {4 * hidden}, hidden, rng);
}

std::pair<TensorPtr, TensorPtr> LstmCell::step(Graph& g, TensorPtr x,
                                               TensorPtr h,
                                               TensorPtr c) const {
  auto z = g.add_row(g.add(g.matmul(std::move(x), Wx), g.matmul(h, Wh)), b);
  auto input_gate = g.sigmoid(g.slice_cols(z, 0, hidden));
  auto forget_gate = g.sigmoid(g.slice_cols(z, hidden, hidden));
  auto candidate = g.tanh(g.slice_cols(z, 2 * hidden, hidden));
  auto output_gate = g.sigmoid(g.slice_cols(z, 3 * hidden, hidden));
  auto c_next = g.add(g.mul(forget_gate, std::move(c)),
                      g.mul(input_gate, candidate));
  auto h_next = g.mul(output_gate, g.tanh(c_next));
  return {h_next, c_next};
}

void LstmCell::collect(std::vector<TensorPtr>& out) const {
  out.push_back(Wx);
  out.push_back(Wh);
  out.push_back(b);
}

GruCell::GruCell(const std::string& name, size_t in, size_t hidden_dim,
                 UniformSampler& rng)
    : hidden(hidden_dim) {
  Wx = make_parameter(name + ".Wx", {in, 3 * hidden}, in, rng);
  Wh = make_parameter(name + ".Wh", {hidden, 3 * hidden}, hidden, rng);
  bx = make_parameter(name + ".bx", {3 * hidden}, hidden, rng);
  bh = make_parameter(name + ".bh", {3 * hidden}, hidden, rng);
}

TensorPtr GruCell::step(Graph& g, TensorPtr x, TensorPtr h) const {
  auto zx = g.add_row(g.matmul(std::move(x), Wx), bx);
  auto zh = g.add_row(g.matmul(h, Wh), bh);
  auto reset = g.sigmoid(g.add(g.slice_cols(zx, 0, hidden),
                               g.slice_cols(zh, 0, hidden)));
  auto update = g.sigmoid(g.add(g.slice_cols(zx, hidden, hidden),
                                g.slice_cols(zh, hidden, hidden)));
  auto candidate =
      g.tanh(g.add(g.slice_cols(zx, 2 * hidden, hidden),
                   g.mul(reset, g.slice_cols(zh, 2 * hidden, hidden))));
  // h' = u * h + (1 - u) * n
  return g.add(g.mul(update, std::move(h)),
               g.mul(g.affine(update, -1.0, 1.0), candidate));
}

void GruCell::collect(std::vector<TensorPtr>& out) const {
  out.push_back(Wx);
  out.push_back(Wh);
  out.push_back(bx);
  out.push_back(bh);
}

std::vector<TensorPtr> run_lstm(Graph& g, const LstmCell& cell, TensorPtr xs,
                                bool reverse) {
  const size_t steps = xs->rows();
  std::vector<TensorPtr> states(steps);
  TensorPtr h = make_tensor({1, cell.hidden});
  TensorPtr c = make_tensor({1, cell.hidden});
  for (size_t k = 0; k < steps; ++k) {
    const size_t t = reverse ? steps - 1 - k : k;
    auto [h_next, c_next] = cell.step(g, g.slice_rows(xs, t, 1), h, c);
    h = h_next;
    c = c_next;
    states[t] = h;
  }
  return states;
}

std::vector<TensorPtr> run_gru(Graph& g, const GruCell& cell, TensorPtr xs,
                               bool reverse) {
  const size_t steps = xs->rows();
  std::vector<TensorPtr> states(steps);
  TensorPtr h = make_tensor({1, cell.hidden});
  for (size_t k = 0; k < steps; ++k) {
    const size_t t = reverse ? steps - 1 - k : k;
    h = cell.step(g, g.slice_rows(xs, t, 1), h);
    states[t] = h;
  }
  return states;
}

namespace {

// Word window centered at `center` with start/stop symbols past the
// sentence borders. Gap g uses the same formula centered at index g, which
// spans both tokens adjacent to the gap.
void append_window(std::vector<int>& out, const data::IdMatrix& ids, size_t row,
                   size_t len, long center, int window) {
  const long half = window / 2;
  for (long d = -half; d <= half; ++d) {
    const long j = center + d;
    if (j < 0)
      out.push_back(data::kStartId);
    else if (j >= static_cast<long>(len))
      out.push_back(data::kStopId);
    else
      out.push_back(ids.at(row, static_cast<size_t>(j)));
  }
}

void append_constant(std::vector<int>& out, int id, int window) {
  for (int k = 0; k < window; ++k) out.push_back(id);
}

int gold_cell(const data::IdMatrix& tags, size_t row, size_t col) {
  const int v = tags.at(row, col);
  if (v < 0)
    throw DataError("sample is missing gold tags for a labeled position");
  return v;
}

}  // namespace

WindowFeatures window_features(const data::Batch& batch, WordTask task,
                               int window) {
  if (window < 1 || window % 2 == 0)
    throw ConfigError(
        strformat("window size must be odd and at least 1, got %d", window));

  WindowFeatures f;
  f.sentence_offsets.push_back(0);
  const bool has_gold =
      (task == WordTask::Mt && batch.mt_tags.has_value()) ||
      (task == WordTask::Gaps && batch.gap_tags.has_value()) ||
      (task == WordTask::Source && batch.src_tags.has_value());

  for (size_t r = 0; r < batch.size; ++r) {
    const size_t n = batch.mt_len[r];
    const size_t m = batch.src_len[r];
    switch (task) {
      case WordTask::Mt:
        for (size_t i = 0; i < n; ++i) {
          append_window(f.own_ids, batch.mt_ids, r, n, static_cast<long>(i),
                        window);
          const int a = batch.aligned_src_pos.at(r, i);
          if (a < 0)
            append_constant(f.aligned_ids, data::kUnalignedId, window);
          else
            append_window(f.aligned_ids, batch.src_ids, r, m, a, window);
          if (has_gold) f.gold.push_back(gold_cell(*batch.mt_tags, r, i));
        }
        break;
      case WordTask::Gaps:
        for (size_t gpos = 0; gpos <= n; ++gpos) {
          append_window(f.own_ids, batch.mt_ids, r, n,
                        static_cast<long>(gpos), window);
          if (gpos == 0) {
            append_constant(f.aligned_ids, data::kStartId, window);
          } else {
            const int a = batch.aligned_src_pos.at(r, gpos - 1);
            if (a < 0)
              append_constant(f.aligned_ids, data::kUnalignedId, window);
            else
              append_window(f.aligned_ids, batch.src_ids, r, m, a, window);
          }
          if (has_gold) f.gold.push_back(gold_cell(*batch.gap_tags, r, gpos));
        }
        break;
      case WordTask::Source:
        for (size_t i = 0; i < m; ++i) {
          append_window(f.own_ids, batch.src_ids, r, m, static_cast<long>(i),
                        window);
          const int a = batch.aligned_mt_pos.at(r, i);
          if (a < 0)
            append_constant(f.aligned_ids, data::kUnalignedId, window);
          else
            append_window(f.aligned_ids, batch.mt_ids, r, n, a, window);
          if (has_gold) f.gold.push_back(gold_cell(*batch.src_tags, r, i));
        }
        break;
    }
    f.sentence_offsets.push_back(f.own_ids.size() / static_cast<size_t>(window));
  }
  f.positions = f.own_ids.size() / static_cast<size_t>(window);
  return f;
}

}  // namespace kiwi::models
