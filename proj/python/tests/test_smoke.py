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

import math

import pytest

import divrank


def test_measure_hand_values():
    assert divrank.raw_dcem([0], [[1]]) == pytest.approx(1.0)
    params = divrank.MeasureParams(divrank.Measure.ALPHA_NDCG)
    got = divrank.raw_dcem([0, 1], [[1, 1], [0, 0]], [0.5, 0.5], params)
    assert got == pytest.approx(0.5 * (1 + 0.5 / math.log2(3)), abs=1e-12)


def test_feature_functions():
    assert divrank.odp_distance(
        ["Arts/Movies/Awards"], ["Arts/Movies/Filmmaking/Directing/Directors"]
    ) == 3 / 5
    assert divrank.url_dissim("news.a.com/p", "blog.a.com/q") == 0.5
    assert divrank.cosine_dissim([1, 1, 0], [1, 0, 0]) == pytest.approx(1 - 1 / math.sqrt(2))


def test_errors_are_translated():
    with pytest.raises(divrank.DivrankError, match="invalid-ranking"):
        divrank.raw_dcem([0, 0], [[1, 1]])
    with pytest.raises(divrank.DivrankError):
        divrank.MeasureParams(alpha=0.0)


def test_train_and_predict():
    ds = divrank.synthesize(queries=20, docs=15, seed=3)
    assert ds.channels and ds.rel_dim == 8
    train = ds.split("train")
    params = divrank.MeasureParams(cutoff=5)
    weights, stats = divrank.train(train, c=1.0, params=params)
    assert not stats["truncated"]
    assert len(weights.w_rel) == 8 and len(weights.w_div) == len(ds.channels)
    query = train[0]
    target = divrank.build_target(query, params)
    assert divrank.dcem(target, query, params) == 1.0
    ranking = divrank.predict(weights, query, 5)
    assert len(set(ranking)) == 5
    assert 0.0 <= divrank.mean_dcem(weights, train, params) <= 1.0


def test_command_line(tmp_path):
    data = str(tmp_path / "d.jsonl")
    status, _, err = divrank.run_cli(["synth", "--out", data, "--queries", "5", "--docs", "6"])
    assert status == 0, err
    loaded = divrank.load_dataset(data)
    assert len(loaded.queries) == 5
    status, _, err = divrank.run_cli(["predict", "--data", data])
    assert status != 0 and err.startswith("error: kind=usage")
