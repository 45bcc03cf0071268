#include "ragq/lstm.hpp"

#include "ragq/errors.hpp"

namespace ragq {

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) { return 1.0 / (1.0 + (-z).exp()); }

struct Gates {
  Eigen::ArrayXd i, f, o, g;
};

Gates gates(const Eigen::VectorXd& x, const Eigen::VectorXd& h, const LstmCellParams& p) {
  const Eigen::Index hs = p.hidden_size();
  const Eigen::VectorXd z = p.w_input * x + p.w_hidden * h + p.bias;
  return {sigmoid(z.segment(0, hs).array()), sigmoid(z.segment(hs, hs).array()),
          sigmoid(z.segment(2 * hs, hs).array()), z.segment(3 * hs, hs).array().tanh()};
}

void check_shapes(const Eigen::VectorXd& x, const Eigen::VectorXd& h, const Eigen::VectorXd& c,
                  const LstmCellParams& p) {
  p.validate();
  if (x.size() != p.input_size()) throw ArgumentError("lstm: input size mismatch");
  if (h.size() != p.hidden_size() || c.size() != p.hidden_size())
    throw ArgumentError("lstm: state size mismatch");
}

}  // namespace

LstmCellParams LstmCellParams::zeros(Eigen::Index input_size, Eigen::Index hidden_size) {
  return {Eigen::MatrixXd::Zero(4 * hidden_size, input_size),
          Eigen::MatrixXd::Zero(4 * hidden_size, hidden_size), Eigen::VectorXd::Zero(4 * hidden_size)};
}

void LstmCellParams::validate() const {
  const Eigen::Index hs = w_hidden.cols();
  if (hs < 1 || w_hidden.rows() != 4 * hs || w_input.rows() != 4 * hs || bias.size() != 4 * hs)
    throw ArgumentError("lstm: inconsistent parameter shapes");
}

LstmStepResult lstm_cell_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                              const Eigen::VectorXd& c, const LstmCellParams& p) {
  check_shapes(x, h, c, p);
  const Gates gt = gates(x, h, p);
  const Eigen::ArrayXd c_new = gt.f * c.array() + gt.i * gt.g;
  const Eigen::ArrayXd h_new = gt.o * c_new.tanh();
  return {h_new.matrix(), c_new.matrix()};
}

LstmStepGrad lstm_cell_backward(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& c, const LstmCellParams& p,
                                const Eigen::VectorXd& dh_next, const Eigen::VectorXd& dc_next) {
  check_shapes(x, h, c, p);
  const Eigen::Index hs = p.hidden_size();
  if (dh_next.size() != hs || dc_next.size() != hs) throw ArgumentError("lstm: gradient size mismatch");

  const Gates gt = gates(x, h, p);
  const Eigen::ArrayXd c_new = gt.f * c.array() + gt.i * gt.g;
  const Eigen::ArrayXd tc = c_new.tanh();

  const Eigen::ArrayXd d_o = dh_next.array() * tc;
  const Eigen::ArrayXd dc = dc_next.array() + dh_next.array() * gt.o * (1.0 - tc * tc);
  const Eigen::ArrayXd d_i = dc * gt.g;
  const Eigen::ArrayXd d_g = dc * gt.i;
  const Eigen::ArrayXd d_f = dc * c.array();

  Eigen::VectorXd dz(4 * hs);
  dz.segment(0, hs) = (d_i * gt.i * (1.0 - gt.i)).matrix();
  dz.segment(hs, hs) = (d_f * gt.f * (1.0 - gt.f)).matrix();
  dz.segment(2 * hs, hs) = (d_o * gt.o * (1.0 - gt.o)).matrix();
  dz.segment(3 * hs, hs) = (d_g * (1.0 - gt.g * gt.g)).matrix();

  LstmStepGrad out;
  out.params.w_input = dz * x.transpose();
  out.params.w_hidden = dz * h.transpose();
  out.params.bias = dz;
  out.x = p.w_input.transpose() * dz;
  out.h = p.w_hidden.transpose() * dz;
  out.c = (dc * gt.f).matrix();
  return out;
}

}  // namespace ragq
