#include "fsru/train.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "fsru/graph.hpp"

namespace fsru {

namespace {

std::vector<Sample> gather(const Dataset& dataset,
                           const std::vector<int>& indices, int begin,
                           int end) {
    std::vector<Sample> batch;
    batch.reserve(end - begin);
    for (int i = begin; i < end; ++i)
        batch.push_back(dataset.samples[indices[i]]);
    return batch;
}

void accumulate_report(LossReport& into, const LossReport& part, int count) {
    into.l_cls += part.l_cls * count;
    into.l_full += part.l_full * count;
    into.l_self += part.l_self * count;
    into.total += part.total * count;
    into.mean_gamma += part.mean_gamma * count;
    into.alpha = part.alpha;
    into.beta = part.beta;
    into.degenerate_batch = into.degenerate_batch || part.degenerate_batch;
}

void finish_report(LossReport& report, int total_count) {
    if (total_count == 0) return;
    report.l_cls /= total_count;
    report.l_full /= total_count;
    report.l_self /= total_count;
    report.total /= total_count;
    report.mean_gamma /= total_count;
}

std::string metrics_line(int epoch, const char* split,
                         const LossReport& report, const Metrics& metrics) {
    char line[512];
    std::snprintf(line, sizeof(line),
                  "%d,%s,%.8f,%.8f,%.8f,%.8f,%.8f,%.6f,%.6f,%.6f,%.6f,%.6f,"
                  "%.6f,%.6f\n",
                  epoch, split, report.l_cls, report.l_full, report.l_self,
                  report.total, report.mean_gamma, metrics.accuracy,
                  metrics.precision_rumor, metrics.recall_rumor,
                  metrics.f1_rumor, metrics.precision_nonrumor,
                  metrics.recall_nonrumor, metrics.f1_nonrumor);
    return line;
}

std::string dump_batch(const std::vector<Sample>& batch) {
    std::ostringstream out;
    out << "batch of " << batch.size() << " samples; labels:";
    for (const Sample& s : batch) out << ' ' << s.label;
    out << "\nfirst token ids:";
    if (!batch.empty())
        for (int id : batch.front().text.token_ids) out << ' ' << id;
    out << '\n';
    return out.str();
}

}  // namespace

std::string metrics_csv_header() {
    return "epoch,split,l_cls,l_full,l_self,total,mean_gamma,accuracy,"
           "precision_rumor,recall_rumor,f1_rumor,precision_nonrumor,"
           "recall_nonrumor,f1_nonrumor\n";
}

int TrainResult::epochs_to_accuracy(double bar) const {
    for (const EpochStats& stats : history)
        if (stats.test_metrics.accuracy >= bar) return stats.epoch;
    return -1;
}

EvalResult evaluate_model(const Model& model, const Dataset& dataset,
                          int batch_size) {
    EvalResult result;
    const int count = static_cast<int>(dataset.samples.size());
    std::vector<int> indices(count);
    std::iota(indices.begin(), indices.end(), 0);
    std::vector<int> labels;
    labels.reserve(count);
    for (int begin = 0; begin < count; begin += batch_size) {
        const int end = std::min(count, begin + batch_size);
        std::vector<Sample> batch = gather(dataset, indices, begin, end);
        Model::BatchResult out = model.forward(batch);
        accumulate_report(result.report, out.report, end - begin);
        for (int p : out.predictions) result.predictions.push_back(p);
        for (const Sample& s : batch) labels.push_back(s.label);
    }
    finish_report(result.report, count);
    result.metrics = compute_metrics(result.predictions, labels);
    return result;
}

TrainResult train_model(Model& model, const Dataset& train_set,
                        const Dataset& test_set, const TrainConfig& config) {
    TrainResult result;
    result.metrics_csv = metrics_csv_header();
    result.convergence_csv = "epoch,mixer_kind,train_loss,test_accuracy\n";

    Adam optimizer(model.parameters(), config.adam);
    Rng shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    const int count = static_cast<int>(train_set.samples.size());
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);

    const std::string mixer_name = to_string(model.config.mixer);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        LossReport epoch_report;
        std::vector<int> predictions, labels;
        predictions.reserve(count);
        labels.reserve(count);
        int batch_index = 0;
        for (int begin = 0; begin < count;
             begin += config.batch_size, ++batch_index) {
            const int end = std::min(count, begin + config.batch_size);
            std::vector<Sample> batch = gather(train_set, order, begin, end);
            Graph graph;
            Model::BatchResult out;
            {
                Graph::Record record(graph);
                out = model.forward(batch);
            }
            if (!std::isfinite(out.loss.item()))
                throw NumericFailure(epoch, batch_index, dump_batch(batch));
            graph.backward(out.loss);
            optimizer.step();
            optimizer.zero_grad();
            accumulate_report(epoch_report, out.report, end - begin);
            for (int p : out.predictions) predictions.push_back(p);
            for (const Sample& s : batch) labels.push_back(s.label);
        }
        finish_report(epoch_report, count);

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_report = epoch_report;
        stats.train_metrics = compute_metrics(predictions, labels);
        EvalResult eval = evaluate_model(model, test_set, config.batch_size);
        stats.test_report = eval.report;
        stats.test_metrics = eval.metrics;
        result.history.push_back(stats);

        result.metrics_csv +=
            metrics_line(epoch, "train", stats.train_report, stats.train_metrics);
        result.metrics_csv +=
            metrics_line(epoch, "test", stats.test_report, stats.test_metrics);
        char conv[128];
        std::snprintf(conv, sizeof(conv), "%d,%s,%.8f,%.6f\n", epoch,
                      mixer_name.c_str(), stats.train_report.total,
                      stats.test_metrics.accuracy);
        result.convergence_csv += conv;
    }
    if (!result.history.empty())
        result.final_test = result.history.back().test_metrics;
    return result;
}

std::pair<Dataset, Dataset> fold_split(const Dataset& dataset, int folds,
                                       int fold_index, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("fold_split: folds must be >= 2");
    if (fold_index < 0 || fold_index >= folds)
        throw std::invalid_argument("fold_split: fold index out of range");
    std::vector<int> order(dataset.samples.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed ^ 0xc2b2ae3d27d4eb4full);
    rng.shuffle(order);

    Dataset train = dataset, held_out = dataset;
    train.samples.clear();
    held_out.samples.clear();
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Sample& s = dataset.samples[order[i]];
        if (static_cast<int>(i % folds) == fold_index)
            held_out.samples.push_back(s);
        else
            train.samples.push_back(s);
    }
    return {train, held_out};
}

}  // namespace fsru
