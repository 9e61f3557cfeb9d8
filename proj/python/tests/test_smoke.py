import pytest

import clustermerge as cm


def test_align_hand_values():
    score, span_a, span_b = cm.align("AAA", "AAA")
    assert score == 6
    assert span_a == (0, 3) and span_b == (0, 3)
    assert cm.align("W", "W")[0] == 17
    assert cm.align("AAAA", "WWWW")[0] == 0


def test_cluster_and_recall_on_planted_families():
    store = cm.SequenceStore.from_records(cm.planted_families(families=6, copies=5, seed=4))
    assert len(store) == 30
    clusters = cm.cluster(store, threads=2)
    covered = {m for _, members in clusters for m in members}
    assert covered == set(range(len(store)))
    for rep, members in clusters:
        assert members[0] == rep
        assert len(set(members)) == len(members)

    truth = cm.brute_force_pairs(store)
    found = cm.extract_pairs(store, clusters)
    report = cm.recall(truth, found)
    assert report["anomaly_count"] == 0
    assert report["recall"] >= 0.99
    assert cm.cluster_stats(store, clusters)["total_clusters"] == len(clusters)


def test_scoring_is_configurable():
    strict = cm.Scoring()
    strict.similarity = 10_000
    strict.full_merge = 10_000
    store = cm.SequenceStore.from_records(cm.planted_families(families=2, copies=3, seed=1))
    assert cm.brute_force_pairs(store, scoring=strict) == []


def test_bad_input_raises():
    with pytest.raises(ValueError):
        cm.SequenceStore.from_records([("x", "AC1")])
