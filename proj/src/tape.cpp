/**
 * Copyright 2026 The amplab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "amplab/tape.hpp"

#include "amplab/errors.hpp"

namespace amplab {

const Tensor& Var::value() const {
  if (!tape) throw ContractError("use of an unbound Var");
  return tape->value(*this);
}

void Tape::check_var(Var v) const {
  if (v.tape != this) throw ContractError("Var belongs to a different tape");
  if (v.id >= nodes_.size()) throw ContractError("Var id out of range");
}

Var Tape::leaf(Tensor& external) {
  Node n;
  n.op = "leaf";
  n.external = &external;
  n.is_leaf = true;
  n.requires_grad = mode_ == GradMode::kEnabled && external.requires_grad;
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Var Tape::variable(Tensor value) {
  Node n;
  n.op = "variable";
  value.requires_grad = true;
  n.owned = std::move(value);
  n.is_leaf = true;
  n.requires_grad = mode_ == GradMode::kEnabled;
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = "constant";
  value.requires_grad = false;
  n.owned = std::move(value);
  n.is_leaf = true;
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Var Tape::record(std::string_view op, std::span<const Var> inputs, Tensor output,
                 BackwardFn backward) {
  Node n;
  n.op = std::string(op);
  n.owned = std::move(output);
  bool any = false;
  for (const Var& in : inputs) {
    check_var(in);
    n.inputs.push_back(in.id);
    any = any || nodes_[in.id].requires_grad;
  }
  n.requires_grad = mode_ == GradMode::kEnabled && any && static_cast<bool>(backward);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

const Tensor& Tape::value(Var v) const {
  check_var(v);
  return nodes_[v.id].tensor();
}

bool Tape::requires_grad(Var v) const {
  check_var(v);
  return nodes_[v.id].requires_grad;
}

std::string_view Tape::op_name(Var v) const {
  check_var(v);
  return nodes_[v.id].op;
}

const std::optional<std::vector<double>>& Tape::grad(Var v) const {
  check_var(v);
  return nodes_[v.id].tensor().grad;
}

std::vector<std::vector<double>> Tape::run_reverse(Var root, bool accumulate) {
  check_var(root);
  const Tensor& root_value = nodes_[root.id].tensor();
  if (root_value.numel() != 1) {
    throw ContractError("backward root must be scalar, got shape " + shape_str(root_value.shape));
  }
  std::vector<std::vector<double>> adj(root.id + 1);
  adj[root.id].assign(1, 1.0);
  last_visits_ = 0;

  std::vector<double> flipped;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    ++last_visits_;
    Node& node = nodes_[i];
    if (!node.requires_grad || adj[i].empty()) continue;
    if (node.is_leaf) {
      if (accumulate) {
        Tensor& target = node.external ? *node.external : node.owned;
        target.accumulate_grad(adj[i]);
      }
      continue;
    }
    BackwardContext ctx;
    ctx.output_ = &node.owned;
    if (!sign_flip_op_.empty() && node.op == sign_flip_op_) {
      flipped.resize(adj[i].size());
      for (std::size_t k = 0; k < flipped.size(); ++k) flipped[k] = -adj[i][k];
      ctx.grad_out_ = flipped;
    } else {
      ctx.grad_out_ = adj[i];
    }
    ctx.inputs_.reserve(node.inputs.size());
    ctx.grad_in_.reserve(node.inputs.size());
    for (std::size_t in : node.inputs) {
      const Node& src = nodes_[in];
      ctx.inputs_.push_back(&src.tensor());
      if (src.requires_grad) {
        if (adj[in].empty()) adj[in].assign(src.tensor().numel(), 0.0);
        ctx.grad_in_.emplace_back(adj[in]);
      } else {
        ctx.grad_in_.emplace_back();
      }
    }
    node.backward(ctx);
  }
  return adj;
}

void Tape::backward(Var root) { run_reverse(root, true); }

std::vector<std::vector<double>> Tape::gradients(Var root, std::span<const Var> wrt) {
  for (const Var& w : wrt) check_var(w);
  auto adj = run_reverse(root, false);
  std::vector<std::vector<double>> out;
  out.reserve(wrt.size());
  for (const Var& w : wrt) {
    if (w.id < adj.size() && !adj[w.id].empty()) {
      out.push_back(adj[w.id]);
    } else {
      out.emplace_back(nodes_[w.id].tensor().numel(), 0.0);
    }
  }
  return out;
}

}  // namespace amplab
