#include <doctest.h>

#include <cmath>

#include "augmod/nn/layers.hpp"
#include "test_util.hpp"

using namespace augmod;
using nn::MatX;
using nn::VecX;

namespace {

MatX<double> random_mat(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  MatX<double> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * (2.0 * rng.uniform() - 1.0);
  return m;
}

}  // namespace

TEST_CASE("conv1d with a centered identity kernel is the identity") {
  MatX<double> x(1, 5);
  x << 1, 2, 3, 4, 5;
  MatX<double> w(1, 7);
  w << 0, 0, 0, 1, 0, 0, 0;
  VecX<double> b = VecX<double>::Zero(1);
  const MatX<double> y = nn::conv1d_forward(x, w, b);
  CHECK(y.rows() == 1);
  CHECK(y.cols() == 5);
  CHECK((y - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conv1d all-ones kernel shows the zero-padded edges") {
  const double c = 1.75;
  const Eigen::Index steps = 9;
  const MatX<double> x = MatX<double>::Constant(1, steps, c);
  const MatX<double> w = MatX<double>::Ones(1, 7);
  const VecX<double> b = VecX<double>::Zero(1);
  const MatX<double> y = nn::conv1d_forward(x, w, b);
  CHECK(y(0, 0) == doctest::Approx(4 * c));
  CHECK(y(0, 1) == doctest::Approx(5 * c));
  CHECK(y(0, 2) == doctest::Approx(6 * c));
  for (Eigen::Index t = 3; t < steps - 3; ++t) CHECK(y(0, t) == doctest::Approx(7 * c));
  CHECK(y(0, steps - 1) == doctest::Approx(4 * c));
}

TEST_CASE("conv1d with zero weights emits the bias") {
  Rng rng(1);
  const MatX<double> x = random_mat(3, 11, rng);
  const MatX<double> w = MatX<double>::Zero(4, 3 * 7);
  VecX<double> b(4);
  b << -1, 0.5, 2, 7;
  const MatX<double> y = nn::conv1d_forward(x, w, b);
  for (Eigen::Index c = 0; c < 4; ++c)
    for (Eigen::Index t = 0; t < 11; ++t) CHECK(y(c, t) == b[c]);
}

TEST_CASE("conv1d output keeps the input time length") {
  Rng rng(2);
  for (Eigen::Index steps : {1, 2, 3, 7, 20, 127}) {
    const MatX<double> x = random_mat(2, steps, rng);
    const MatX<double> w = random_mat(5, 2 * 7, rng);
    const VecX<double> b = VecX<double>::Zero(5);
    CHECK(nn::conv1d_forward(x, w, b).cols() == steps);
  }
}

TEST_CASE("conv1d rejects inconsistent shapes") {
  const MatX<double> x = MatX<double>::Zero(3, 5);
  const MatX<double> w = MatX<double>::Zero(4, 20);  // not a multiple of 3
  const VecX<double> b = VecX<double>::Zero(4);
  CHECK_THROWS_AS(nn::conv1d_forward(x, w, b), std::invalid_argument);

  const MatX<double> w2 = MatX<double>::Zero(4, 21);
  const VecX<double> bad_b = VecX<double>::Zero(3);
  CHECK_THROWS_AS(nn::conv1d_forward(x, w2, bad_b), std::invalid_argument);

  MatX<double> gx, gw;
  VecX<double> gb;
  const MatX<double> g = MatX<double>::Zero(4, 6);  // wrong T
  CHECK_THROWS_AS(nn::conv1d_backward(g, x, w2, gx, gw, gb), std::invalid_argument);
}

TEST_CASE("conv1d backward: zero grad and linearity") {
  Rng rng(3);
  const MatX<double> x = random_mat(2, 9, rng);
  const MatX<double> w = random_mat(3, 2 * 7, rng);
  MatX<double> gx, gw, gx2, gw2;
  VecX<double> gb, gb2;

  nn::conv1d_backward(MatX<double>(MatX<double>::Zero(3, 9)), x, w, gx, gw, gb);
  CHECK(gx.cwiseAbs().maxCoeff() == 0.0);
  CHECK(gw.cwiseAbs().maxCoeff() == 0.0);
  CHECK(gb.cwiseAbs().maxCoeff() == 0.0);

  const MatX<double> g = random_mat(3, 9, rng);
  nn::conv1d_backward(g, x, w, gx, gw, gb);
  nn::conv1d_backward(MatX<double>(2.0 * g), x, w, gx2, gw2, gb2);
  CHECK((gx2 - 2.0 * gx).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((gw2 - 2.0 * gw).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((gb2 - 2.0 * gb).cwiseAbs().maxCoeff() < 1e-12);

  // grad_bias is the per-channel sum of grad_out
  CHECK((gb - g.rowwise().sum()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("relu basics") {
  MatX<double> x(1, 3);
  x << -1, 0, 2;
  const MatX<double> y = nn::relu(x);
  CHECK(y(0, 0) == 0.0);
  CHECK(y(0, 1) == 0.0);
  CHECK(y(0, 2) == 2.0);

  Rng rng(4);
  const MatX<double> r = random_mat(4, 6, rng);
  CHECK(testutil::bits_equal(nn::relu(MatX<double>(nn::relu(r))), nn::relu(r)));  // idempotent

  // subgradient 0 at 0, pass-through above, blocked below
  const MatX<double> g = MatX<double>::Ones(1, 3);
  const MatX<double> gx = nn::relu_backward(g, x);
  CHECK(gx(0, 0) == 0.0);
  CHECK(gx(0, 1) == 0.0);
  CHECK(gx(0, 2) == 1.0);
}

TEST_CASE("global average pool collapses time") {
  CHECK(nn::global_avg_pool(MatX<double>(MatX<double>::Constant(3, 17, 2.5))).isApproxToConstant(2.5));

  MatX<double> x(1, 4);
  x << 1, 2, 3, 4;
  CHECK(nn::global_avg_pool(x)(0) == doctest::Approx(2.5));

  Rng rng(5);
  const MatX<double> r = random_mat(3, 10, rng);
  MatX<double> shuffled(3, 10);
  const int perm[10] = {4, 2, 7, 0, 9, 1, 3, 8, 5, 6};
  for (int t = 0; t < 10; ++t) shuffled.col(t) = r.col(perm[t]);
  CHECK((nn::global_avg_pool(r) - nn::global_avg_pool(shuffled)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(nn::global_avg_pool(MatX<double>(3, 0)), std::invalid_argument);

  // backward spreads grad/T uniformly
  VecX<double> g(2);
  g << 4.0, -8.0;
  const MatX<double> gx = nn::global_avg_pool_backward(g, 4);
  CHECK(gx.rows() == 2);
  CHECK(gx.cols() == 4);
  CHECK(gx(0, 0) == doctest::Approx(1.0));
  CHECK(gx(1, 3) == doctest::Approx(-2.0));
}

TEST_CASE("dense layer basics") {
  Rng rng(6);
  const VecX<double> x = random_mat(5, 1, rng).col(0);
  const MatX<double> eye = MatX<double>::Identity(5, 5);
  const MatX<double> zero_w = MatX<double>::Zero(2, 5);
  const MatX<double> bad_w = MatX<double>::Zero(2, 4);
  const VecX<double> zero = VecX<double>::Zero(5);
  CHECK((nn::dense_forward(x, eye, zero) - x).cwiseAbs().maxCoeff() == 0.0);

  VecX<double> b(2);
  b << 3, -4;
  CHECK((nn::dense_forward(x, zero_w, b) - b).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(nn::dense_forward(x, bad_w, b), std::invalid_argument);
}

TEST_CASE("dropout is the identity at inference and keeps the mean when training") {
  Rng rng(7);
  const MatX<double> x = random_mat(10, 10, rng, 3.0);

  MatX<double> mask;
  CHECK(testutil::bits_equal(nn::dropout_forward(x, 0.5, false, nullptr, &mask), x));
  CHECK(mask.size() == 0);
  CHECK(testutil::bits_equal(nn::dropout_forward(x, 0.0, true, &rng, &mask), x));

  const MatX<double> ones = MatX<double>::Ones(1000, 1000);
  const MatX<double> y = nn::dropout_forward(ones, 0.5, true, &rng, &mask);
  const double zero_fraction =
      static_cast<double>((y.array() == 0.0).count()) / static_cast<double>(y.size());
  CHECK(zero_fraction == doctest::Approx(0.5).epsilon(0.02));
  CHECK(y.mean() == doctest::Approx(1.0).epsilon(0.02));  // survivors scaled by 1/(1-rate)

  // backward applies the recorded mask
  const MatX<double> g = MatX<double>::Ones(1000, 1000);
  CHECK(testutil::bits_equal(nn::dropout_backward(g, mask), mask));

  CHECK_THROWS_AS(nn::dropout_forward(x, 1.0, true, &rng), std::invalid_argument);
  CHECK_THROWS_AS(nn::dropout_forward(x, 0.5, true, nullptr), std::invalid_argument);
}

TEST_CASE("softmax cross-entropy: uniform logits, stability, zero-sum gradient") {
  const VecX<double> flat = VecX<double>::Zero(7);
  const VecX<double> one_logit = VecX<double>::Zero(1);
  const auto [loss, grad] = nn::softmax_cross_entropy(flat, 3);
  CHECK(loss == doctest::Approx(std::log(7.0)).epsilon(1e-9));  // 1.945910...
  CHECK(grad.sum() == doctest::Approx(0.0).epsilon(1e-12));

  VecX<double> extreme(3);
  extreme << 1e4, -1e4, 0.0;
  const auto [loss2, grad2] = nn::softmax_cross_entropy(extreme, 0);
  CHECK(std::isfinite(loss2));
  CHECK(grad2.allFinite());

  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const VecX<double> logits = random_mat(5, 1, rng, 10.0).col(0);
    const auto [l, g] = nn::softmax_cross_entropy(logits, static_cast<int>(rng.below(5)));
    CHECK(std::fabs(g.sum()) < 1e-12);
    CHECK(l >= 0.0);
  }

  CHECK_THROWS_AS(nn::softmax_cross_entropy(flat, 7), std::out_of_range);
  CHECK_THROWS_AS(nn::softmax_cross_entropy(flat, -1), std::out_of_range);
  CHECK_THROWS_AS(nn::softmax_cross_entropy(one_logit, 0), std::invalid_argument);

  const VecX<double> p = nn::softmax(extreme);
  CHECK(p.minCoeff() >= 0.0);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("glorot uniform respects the fan bound") {
  // conv 2->32, k=7: fans are channels x kernel
  const double bound = std::sqrt(6.0 / (14.0 + 224.0));
  Rng rng(9);
  MatX<float> w(32, 14);
  nn::fill_glorot_uniform(w, 14, 224, rng);
  CHECK(w.cwiseAbs().maxCoeff() <= static_cast<float>(bound));
  CHECK(w.cwiseAbs().maxCoeff() > 0.9f * static_cast<float>(bound));
}

TEST_CASE("he normal variance matches 2/fan_in") {
  Rng rng(10);
  MatX<double> w(1000, 1000);
  nn::fill_he_normal(w, 64, rng);
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / static_cast<double>(w.size());
  CHECK(var == doctest::Approx(2.0 / 64.0).epsilon(0.05));
}

TEST_CASE("param_count follows the conv and dense formulas") {
  using nn::LayerSpec;
  CHECK(nn::param_count({LayerSpec::conv1d(2, 32, 7)}) == 480);
  CHECK(nn::param_count({LayerSpec::dense(64, 7)}) == 455);
  CHECK(nn::param_count({LayerSpec::residual(2, 48)}) == 144 + 2 * 16176);
  CHECK(nn::param_count({LayerSpec::relu(), LayerSpec::global_avg_pool(),
                         LayerSpec::dropout(0.5), LayerSpec::softmax()}) == 0);
  CHECK_THROWS_AS(nn::param_count({LayerSpec::conv1d(2, 32, 5)}), std::invalid_argument);
}
