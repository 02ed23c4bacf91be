// Copyright 2026 The t6gps Authors
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

#include "t6gps/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "t6gps/error.hpp"

namespace t6gps {
namespace {

constexpr int kCheckpointVersion = 1;

nlohmann::json MatrixToJson(const MatX& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

MatX MatrixFromJson(const nlohmann::json& j) {
  int rows = j.at("rows").get<int>();
  int cols = j.at("cols").get<int>();
  auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<int>(data.size()) != rows * cols) {
    throw Error(ErrorCategory::kIo, "checkpoint matrix size mismatch");
  }
  MatX m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

VecX VectorFromJson(const nlohmann::json& j) {
  auto data = j.get<std::vector<double>>();
  return Eigen::Map<VecX>(data.data(), data.size());
}

}  // namespace

void SavePolicyCheckpoint(const PolicyParams& params,
                          const std::string& path) {
  nlohmann::json doc;
  doc["format"] = "t6gps-policy";
  doc["version"] = kCheckpointVersion;
  doc["w1"] = MatrixToJson(params.w1);
  doc["w2"] = MatrixToJson(params.w2);
  doc["w3"] = MatrixToJson(params.w3);
  doc["w4"] = MatrixToJson(params.w4);
  doc["b1"] = std::vector<double>(params.b1.data(),
                                  params.b1.data() + params.b1.size());
  doc["b2"] = std::vector<double>(params.b2.data(),
                                  params.b2.data() + params.b2.size());
  doc["b3"] = std::vector<double>(params.b3.data(),
                                  params.b3.data() + params.b3.size());
  doc["b4"] = std::vector<double>(params.b4.data(),
                                  params.b4.data() + params.b4.size());
  doc["input_mean"] = std::vector<double>(
      params.input_mean.data(),
      params.input_mean.data() + params.input_mean.size());
  doc["input_std"] = std::vector<double>(
      params.input_std.data(),
      params.input_std.data() + params.input_std.size());
  doc["out_lo"] = params.out_lo;
  doc["out_hi"] = params.out_hi;
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCategory::kIo, "cannot write checkpoint: " + path);
  }
  out << doc.dump();
  if (!out) throw Error(ErrorCategory::kIo, "checkpoint write failed: " + path);
}

PolicyParams LoadPolicyCheckpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open checkpoint: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kIo,
                "checkpoint parse error: " + std::string(e.what()));
  }
  if (doc.value("format", "") != "t6gps-policy" ||
      doc.value("version", -1) != kCheckpointVersion) {
    throw Error(ErrorCategory::kIo, "checkpoint format/version mismatch");
  }
  PolicyParams p;
  p.w1 = MatrixFromJson(doc.at("w1"));
  p.w2 = MatrixFromJson(doc.at("w2"));
  p.w3 = MatrixFromJson(doc.at("w3"));
  p.w4 = MatrixFromJson(doc.at("w4"));
  p.b1 = VectorFromJson(doc.at("b1"));
  p.b2 = VectorFromJson(doc.at("b2"));
  p.b3 = VectorFromJson(doc.at("b3"));
  p.b4 = VectorFromJson(doc.at("b4"));
  p.input_mean = VectorFromJson(doc.at("input_mean"));
  p.input_std = VectorFromJson(doc.at("input_std"));
  p.out_lo = doc.at("out_lo").get<double>();
  p.out_hi = doc.at("out_hi").get<double>();
  if (p.w1.rows() != kPolicyHidden || p.w1.cols() != kObservationDim ||
      p.w4.rows() != kNumCables || p.w4.cols() != kPolicyHidden) {
    throw Error(ErrorCategory::kIo, "checkpoint layer shape mismatch");
  }
  if (!p.finite()) {
    throw Error(ErrorCategory::kNumeric, "checkpoint contains non-finite values");
  }
  return p;
}

}  // namespace t6gps
