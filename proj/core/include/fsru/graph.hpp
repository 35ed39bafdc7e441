#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "fsru/tensor.hpp"

namespace fsru {

struct GraphNode {
    const char* op;
    std::vector<std::shared_ptr<TensorImpl>> inputs;
    std::vector<std::shared_ptr<TensorImpl>> outputs;
    std::vector<long> input_ids;
    std::vector<long> output_ids;
    std::function<void()> backward;  // reads output grads, accumulates into inputs
};

// Reverse-mode tape. Ops append nodes in execution order, which is a
// topological order of the forward computation; backward() walks the tape
// once in reverse, visiting each recorded node at most once.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;
    ~Graph();

    // Makes the graph the recording target for the current thread.
    class Record {
    public:
        explicit Record(Graph& g);
        ~Record();
        Record(const Record&) = delete;
        Record& operator=(const Record&) = delete;

    private:
        Graph* previous_;
    };

    static Graph* active();

    void record(const char* op, const std::vector<Tensor>& inputs,
                const std::vector<Tensor>& outputs,
                std::function<void()> backward_fn);

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    // Seeds d(loss)/d(loss) = 1 and propagates gradients to every
    // requires_grad leaf reachable from the loss. Leaves not connected to
    // the loss keep a zero gradient. Throws if loss is not a scalar.
    void backward(const Tensor& loss);

private:
    long id_of(const std::shared_ptr<TensorImpl>& impl);

    std::vector<GraphNode> nodes_;
    std::unordered_map<const TensorImpl*, long> ids_;
    long next_id_ = 0;
};

void backward(const Tensor& loss, Graph& graph);

// Records a node on the active graph when one exists and some input
// requires a gradient; otherwise the op runs untracked.
void record_op(const char* op, const std::vector<Tensor>& inputs,
               const std::vector<Tensor>& outputs,
               std::function<void()> backward_fn);

}  // namespace fsru
