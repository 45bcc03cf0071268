#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Core>

namespace ragq {

// Gate blocks are stacked in the order input, forget, output, candidate:
// rows [0, H) input gate, [H, 2H) forget, [2H, 3H) output, [3H, 4H) candidate.
struct LstmCellParams {
  Eigen::MatrixXd w_input;   // 4H x I
  Eigen::MatrixXd w_hidden;  // 4H x H
  Eigen::VectorXd bias;      // 4H

  static LstmCellParams zeros(Eigen::Index input_size, Eigen::Index hidden_size);

  Eigen::Index input_size() const { return w_input.cols(); }
  Eigen::Index hidden_size() const { return w_hidden.cols(); }
  void validate() const;
};

struct LstmStepResult {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

// One step of the standard cell:
//   i = sig(Wi [h, x] + bi), f = sig(Wf [h, x] + bf), o = sig(Wo [h, x] + bo)
//   g = tanh(Wg [h, x] + bg), c' = f * c + i * g, h' = o * tanh(c')
LstmStepResult lstm_cell_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                              const Eigen::VectorXd& c, const LstmCellParams& p);

struct LstmStepGrad {
  LstmCellParams params;  // d/dW_input, d/dW_hidden, d/dbias
  Eigen::VectorXd x;
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

// Backward pass of lstm_cell_step given upstream gradients of h' and c'.
LstmStepGrad lstm_cell_backward(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& c, const LstmCellParams& p,
                                const Eigen::VectorXd& dh_next, const Eigen::VectorXd& dc_next);

}  // namespace ragq
