#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "fsru/graph.hpp"
#include "fsru/ops.hpp"
#include "fsru/tensor.hpp"
#include "support/test_support.hpp"

using namespace fsru;

TEST_CASE("tensor shape and data agree") {
    Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(t.numel() == 6);
    CHECK(t.at({1, 2}) == 6.0);
    CHECK_THROWS_AS(Tensor({2, 3}, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(Tensor({1, 1, 1, 1}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(Tensor::scalar(1.0).at({0, 0}), std::invalid_argument);
}

TEST_CASE("elementwise arithmetic with broadcast") {
    Tensor a({2, 2}, {1, 2, 3, 4});
    Tensor row({1, 2}, {10, 20});
    Tensor sum = add(a, row);
    CHECK(sum.at({0, 0}) == 11.0);
    CHECK(sum.at({1, 1}) == 24.0);
    Tensor prod = mul(a, row);
    CHECK(prod.at({1, 0}) == 30.0);

    // broadcast allowed only on extent-1 axes
    Tensor bad({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK_THROWS_AS(add(a, bad), std::invalid_argument);
    Tensor rank1({2}, {1, 2});
    CHECK_THROWS_AS(add(a, rank1), std::invalid_argument);
}

TEST_CASE("complex_mul matches direct arithmetic") {
    // (1+2j)(3+4j) = -5 + 10j
    ComplexTensor a = make_complex(Tensor::scalar(1.0), Tensor::scalar(2.0));
    ComplexTensor b = make_complex(Tensor::scalar(3.0), Tensor::scalar(4.0));
    ComplexTensor c = complex_mul(a, b);
    CHECK(c.re.item() == doctest::Approx(-5.0));
    CHECK(c.im.item() == doctest::Approx(10.0));
}

TEST_CASE("abs_sq is the power spectrum") {
    ComplexTensor z = make_complex(Tensor::scalar(3.0), Tensor::scalar(4.0));
    CHECK(abs_sq(z).item() == doctest::Approx(25.0));

    Rng rng(7);
    ComplexTensor w = make_complex(testsupport::random_tensor({4, 3}, rng),
                                   testsupport::random_tensor({4, 3}, rng));
    Tensor p = abs_sq(w);
    for (double v : p.data()) CHECK(v >= 0.0);
}

TEST_CASE("softmax of a constant row is uniform") {
    Tensor z({1, 4}, {0, 0, 0, 0});
    Tensor s = softmax(z, 1);
    for (int j = 0; j < 4; ++j) CHECK(s.at({0, j}) == doctest::Approx(0.25));
}

TEST_CASE("softmax rows sum to one") {
    Rng rng(11);
    Tensor x = testsupport::random_tensor({5, 7}, rng, -3.0, 3.0);
    Tensor s = softmax(x, 1);
    for (int i = 0; i < 5; ++i) {
        double total = 0.0;
        for (int j = 0; j < 7; ++j) total += s.at({i, j});
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("matmul against a hand-computed product") {
    Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
    Tensor b({3, 2}, {7, 8, 9, 10, 11, 12});
    Tensor c = matmul(a, b);
    CHECK(c.at({0, 0}) == 58.0);
    CHECK(c.at({0, 1}) == 64.0);
    CHECK(c.at({1, 0}) == 139.0);
    CHECK(c.at({1, 1}) == 154.0);
    CHECK_THROWS_AS(matmul(a, a), std::invalid_argument);

    Tensor cnt = matmul_nt(a, Tensor({2, 3}, {7, 9, 11, 8, 10, 12}));
    CHECK(cnt.at({0, 0}) == 58.0);
    CHECK(cnt.at({1, 1}) == 154.0);
}

TEST_CASE("reductions keep the reduced axis") {
    Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
    Tensor m0 = mean_axis(a, 0);
    CHECK(m0.shape() == std::vector<int>{1, 3});
    CHECK(m0.at({0, 0}) == doctest::Approx(2.5));
    Tensor s1 = sum_axis(a, 1);
    CHECK(s1.shape() == std::vector<int>{2, 1});
    CHECK(s1.at({1, 0}) == doctest::Approx(15.0));
    CHECK(sum_all(a).item() == doctest::Approx(21.0));
}

TEST_CASE("conv1x1 applies the per-channel map") {
    Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
    Tensor w({3}, {2, 0, -1});
    Tensor b({3}, {0.5, 0.5, 0.5});
    Tensor y = conv1x1(x, w, b);
    CHECK(y.at({0, 0}) == doctest::Approx(2.5));
    CHECK(y.at({0, 1}) == doctest::Approx(0.5));
    CHECK(y.at({1, 2}) == doctest::Approx(-5.5));
}

TEST_CASE("rotate_rows and slice_plane move data where expected") {
    Tensor x({3, 2}, {1, 2, 3, 4, 5, 6});
    Tensor r = rotate_rows(x, 1);
    CHECK(r.at({0, 0}) == 3.0);
    CHECK(r.at({2, 1}) == 2.0);

    Tensor cube({2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
    Tensor plane = slice_plane(cube, 1);
    CHECK(plane.shape() == std::vector<int>{2, 2});
    CHECK(plane.at({0, 0}) == 5.0);
}

TEST_CASE("graph records topologically ordered nodes") {
    Graph graph;
    Tensor x = Tensor::ones({2, 2}, true);
    Tensor loss;
    {
        Graph::Record record(graph);
        loss = sum_all(mul(x, x));
    }
    CHECK(graph.size() == 2);
    for (const GraphNode& node : graph.nodes()) {
        for (long in_id : node.input_ids)
            for (long out_id : node.output_ids) CHECK(in_id < out_id);
    }
    graph.backward(loss);
    for (double g : x.grad()) CHECK(g == doctest::Approx(2.0));
}

TEST_CASE("backward visits shared nodes once") {
    // loss = sum(x + x): the gradient is exactly 2, not 4.
    Graph graph;
    Tensor x = Tensor::ones({3}, true);
    Tensor loss;
    {
        Graph::Record record(graph);
        loss = sum_all(add(x, x));
    }
    graph.backward(loss);
    for (double g : x.grad()) CHECK(g == 2.0);
}

TEST_CASE("backward rejects non-scalar losses") {
    Graph graph;
    Tensor x = Tensor::ones({2, 2}, true);
    Tensor y;
    {
        Graph::Record record(graph);
        y = add(x, x);
    }
    CHECK_THROWS_AS(graph.backward(y), std::invalid_argument);
}

TEST_CASE("disconnected leaves get zero gradients, not errors") {
    Graph graph;
    Tensor x = Tensor::ones({2}, true);
    Tensor unused = Tensor::ones({2}, true);
    Tensor loss;
    {
        Graph::Record record(graph);
        loss = sum_all(x);
    }
    graph.backward(loss);
    CHECK(x.grad()[0] == 1.0);
    CHECK(unused.grad().empty());  // absent buffer reads as zero
    unused.zero_grad();
    CHECK(unused.grad().empty());
}

TEST_CASE("stack_rows scatters gradients back to each row") {
    Graph graph;
    Tensor r0 = Tensor::ones({1, 2}, true);
    Tensor r1 = Tensor::full({1, 2}, 2.0);
    r1.set_requires_grad(true);
    Tensor loss;
    {
        Graph::Record record(graph);
        Tensor stacked = stack_rows({r0, r1});
        loss = sum_all(mul(stacked, stacked));
    }
    graph.backward(loss);
    CHECK(r0.grad()[0] == doctest::Approx(2.0));
    CHECK(r1.grad()[1] == doctest::Approx(4.0));
}
