#include "fsru/graph.hpp"

#include <stdexcept>

namespace fsru {

namespace {
thread_local Graph* g_active = nullptr;
}

Graph::~Graph() = default;

Graph::Record::Record(Graph& g) : previous_(g_active) { g_active = &g; }

Graph::Record::~Record() { g_active = previous_; }

Graph* Graph::active() { return g_active; }

long Graph::id_of(const std::shared_ptr<TensorImpl>& impl) {
    auto [it, inserted] = ids_.try_emplace(impl.get(), next_id_);
    if (inserted) ++next_id_;
    return it->second;
}

void Graph::record(const char* op, const std::vector<Tensor>& inputs,
                   const std::vector<Tensor>& outputs,
                   std::function<void()> backward_fn) {
    GraphNode node;
    node.op = op;
    node.inputs.reserve(inputs.size());
    node.input_ids.reserve(inputs.size());
    for (const Tensor& t : inputs) {
        node.inputs.push_back(t.impl());
        node.input_ids.push_back(id_of(t.impl()));
    }
    node.outputs.reserve(outputs.size());
    node.output_ids.reserve(outputs.size());
    for (const Tensor& t : outputs) {
        node.outputs.push_back(t.impl());
        node.output_ids.push_back(id_of(t.impl()));
    }
    node.backward = std::move(backward_fn);
    nodes_.push_back(std::move(node));
}

void Graph::backward(const Tensor& loss) {
    if (loss.numel() != 1)
        throw std::invalid_argument("backward: loss is not a scalar");
    loss.impl()->grad.assign(1, 1.0);
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        bool any_output_grad = false;
        for (const auto& out : it->outputs) {
            if (!out->grad.empty()) {
                any_output_grad = true;
                break;
            }
        }
        if (any_output_grad) it->backward();
    }
}

void backward(const Tensor& loss, Graph& graph) { graph.backward(loss); }

void record_op(const char* op, const std::vector<Tensor>& inputs,
               const std::vector<Tensor>& outputs,
               std::function<void()> backward_fn) {
    Graph* g = Graph::active();
    if (!g) return;
    bool any_requires = false;
    for (const Tensor& t : inputs) {
        if (t.requires_grad()) {
            any_requires = true;
            break;
        }
    }
    if (!any_requires) return;
    g->record(op, inputs, outputs, std::move(backward_fn));
}

}  // namespace fsru
