# Copyright 2026 The divrank Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Diversified ranking with structural max-margin training."""

from divrank._divrank import (
    Dataset,
    DivrankError,
    Measure,
    MeasureParams,
    QueryInstance,
    WeightVector,
    build_target,
    cosine_dissim,
    dcem,
    load_dataset,
    mean_dcem,
    odp_distance,
    predict,
    raw_dcem,
    run_cli,
    synthesize,
    train,
    url_dissim,
)

__all__ = [
    "Dataset",
    "DivrankError",
    "Measure",
    "MeasureParams",
    "QueryInstance",
    "WeightVector",
    "build_target",
    "cosine_dissim",
    "dcem",
    "load_dataset",
    "mean_dcem",
    "odp_distance",
    "predict",
    "raw_dcem",
    "run_cli",
    "synthesize",
    "train",
    "url_dissim",
]
