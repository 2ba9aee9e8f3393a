// Copyright 2026 The shufflesgd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace shufflesgd::nn {

struct LayerSpec;

struct LinearSpec {
  std::size_t inDim = 0;
  std::size_t outDim = 0;
};
struct ReluSpec {};
struct SigmoidSpec {};
// Looks up `numFields` integer ids per row and concatenates their embeddings:
// [batch, numFields] -> [batch, numFields * embedDim].
struct EmbeddingSpec {
  std::size_t vocabSize = 0;
  std::size_t embedDim = 0;
  std::size_t numFields = 1;
};
// Runs every branch on the same input and concatenates their outputs.
struct ConcatSpec {
  std::vector<LayerSpec> branches;
};
struct SequentialSpec {
  std::vector<LayerSpec> layers;
};

struct LayerSpec {
  std::variant<LinearSpec, ReluSpec, SigmoidSpec, EmbeddingSpec, ConcatSpec, SequentialSpec> node;
};

LayerSpec Linear(std::size_t inDim, std::size_t outDim);
LayerSpec ReLU();
LayerSpec Sigmoid();
LayerSpec Embedding(std::size_t vocabSize, std::size_t embedDim, std::size_t numFields = 1);
LayerSpec Concat(std::vector<LayerSpec> branches);
LayerSpec Sequential(std::vector<LayerSpec> layers);

std::string toString(const LayerSpec& spec);

// Number of parameters K in the flat layout.
std::size_t paramCount(const LayerSpec& spec);
// Width of the input the spec consumes; throws ShapeError for specs whose
// input width is not determined (e.g. a bare activation).
std::size_t inputWidth(const LayerSpec& spec);
// Output width for a given input width; throws ShapeError on mismatch.
std::size_t outputWidth(const LayerSpec& spec, std::size_t inputWidth);
// True when the spec's input is integer ids rather than features.
bool takesIds(const LayerSpec& spec);
// Vocabulary bound for id inputs; meaningful only when takesIds().
std::size_t idBound(const LayerSpec& spec);

// Rejects empty containers, zero dimensions, incompatible neighbours and
// embeddings anywhere but the input position. Throws InvalidArgument.
void validate(const LayerSpec& spec);

}  // namespace shufflesgd::nn
