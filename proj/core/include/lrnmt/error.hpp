// Copyright 2026 The lrnmt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LRNMT_ERROR_HPP_
#define LRNMT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lrnmt {

// Failure classes used across the toolkit. The CLI maps these onto process
// exit codes: config -> 2, data -> 3, numeric -> 4.
enum class ErrorCode {
  config,
  missing_table,
  empty_corpus,
  invalid_id,
  degenerate_input,
  wrong_arity,
  unknown_token,
  zero_vector,
  shape_mismatch,
  id_out_of_range,
  non_finite_loss,
  corrupt_checkpoint,
  empty_candidates,
  empty_task_data,
  empty_stage,
  provider_unavailable,
  invalid_distribution,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace lrnmt

#endif  // LRNMT_ERROR_HPP_
