import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oddkit.core import DataError
from oddkit.data import (LabeledDataset, evaluate_format, format_report,
                         generate_data, precision_at_n, read_csv,
                         read_labeled_csv, read_labels_csv, read_scores_csv,
                         roc_auc, write_labels_csv, write_matrix_csv,
                         write_scores_csv)


def auc_pairwise(y, s):
    # fraction of (positive, negative) pairs ordered correctly, ties count 1/2
    pos = [v for v, t in zip(s, y) if t == 1]
    neg = [v for v, t in zip(s, y) if t == 0]
    total = sum(1.0 if p > n else 0.5 if p == n else 0.0
                for p in pos for n in neg)
    return total / (len(pos) * len(neg))


labeled_scores = st.integers(2, 40).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n).filter(
        lambda y: 0 < sum(y) < len(y)),
    st.lists(st.integers(-20, 20).map(float), min_size=n, max_size=n)))


class TestGenerate:
    def test_shapes(self):
        X_tr, y_tr, X_te, y_te = generate_data(n_train=200, n_test=100,
                                               n_features=2)
        assert X_tr.shape == (200, 2) and X_te.shape == (100, 2)
        assert y_tr.shape == (200,) and y_te.shape == (100,)

    def test_outlier_counts_and_placement(self):
        X_tr, y_tr, X_te, y_te = generate_data(200, 100, 3, contamination=0.1)
        assert y_tr.sum() == 20 and y_te.sum() == 10
        assert y_tr[-20:].tolist() == [1] * 20 and y_tr[:-20].sum() == 0
        assert np.all(np.abs(X_tr[y_tr == 1]) <= 6)

    @pytest.mark.parametrize("n, c", [(7, 0.5), (33, 0.15), (1, 0.3)])
    def test_rounding(self, n, c):
        y = generate_data(n, n, 2, contamination=c)[1]
        assert y.sum() == round(c * n)

    def test_deterministic(self):
        a = generate_data(seed=3)
        b = generate_data(seed=3)
        assert all(np.array_equal(u, v) for u, v in zip(a, b))
        assert not np.array_equal(a[0], generate_data(seed=4)[0])

    def test_validation(self):
        with pytest.raises(ValueError):
            generate_data(0, 10)
        with pytest.raises(ValueError):
            generate_data(contamination=0.6)

    def test_labeled_dataset_checks(self):
        with pytest.raises(ValueError):
            LabeledDataset(np.zeros((3, 1)), np.array([0, 1]))
        with pytest.raises(ValueError):
            LabeledDataset(np.zeros((2, 1)), np.array([0, 2]))


class TestRocAuc:
    def test_cases(self):
        y = [0, 0, 1, 1]
        assert roc_auc(y, [0.1, 0.2, 0.3, 0.4]) == 1.0
        assert roc_auc(y, [0.4, 0.3, 0.2, 0.1]) == 0.0
        assert roc_auc(y, [0.5] * 4) == 0.5

    def test_single_class(self):
        with pytest.raises(ValueError):
            roc_auc([1, 1], [0.1, 0.2])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            roc_auc([0, 1], [0.1])

    @given(labeled_scores)
    def test_matches_pairwise_oracle(self, ys):
        y, s = ys
        assert roc_auc(y, s) == pytest.approx(auc_pairwise(y, s), abs=1e-12)

    @given(labeled_scores)
    def test_monotone_invariance(self, ys):
        y, s = ys
        s = np.array(s)
        assert roc_auc(y, s) == roc_auc(y, np.exp(s / 10) * 3 + 1)

    @given(labeled_scores)
    def test_flip(self, ys):
        y, _ = ys
        s = np.arange(len(y), dtype=float)
        np.random.default_rng(len(y)).shuffle(s)
        assert roc_auc(y, s) + roc_auc(y, -s) == pytest.approx(1.0, abs=1e-12)


class TestPrecisionAtN:
    def test_cases(self):
        assert precision_at_n([0, 0, 1, 1], [0.1, 0.2, 0.3, 0.4]) == 1.0
        assert precision_at_n([0, 0, 1, 1], [0.9, 0.8, 0.1, 0.2]) == 0.0
        assert precision_at_n([0, 1, 1, 0], [0.9, 0.8, 0.1, 0.2]) == 0.5

    def test_ties_prefer_lower_index(self):
        assert precision_at_n([1, 0, 0], [1.0, 1.0, 1.0]) == 1.0
        assert precision_at_n([0, 1, 0], [1.0, 1.0, 1.0]) == 0.0

    def test_no_positives(self):
        with pytest.raises(ValueError):
            precision_at_n([0, 0], [1, 2])

    @given(labeled_scores)
    def test_range(self, ys):
        y, s = ys
        assert 0 <= precision_at_n(y, s) <= 1
        top = np.where(np.array(y) == 1, 100.0, 0.0)
        assert precision_at_n(y, top) == 1.0


class TestFormat:
    def test_reference_report_line(self):
        assert (format_report("ABOD", 0.934, 0.902)
                == "ABOD Performance; ROC: 0.934; Precision at n: 0.902")

    def test_fixed_width(self):
        assert "ROC: 1.000;" in format_report("x", 1.0, 0.5)
        assert "Precision at n: 0.500" in format_report("x", 1.0, 0.5)

    def test_rounding(self):
        assert "ROC: 0.123;" in format_report("x", 0.12345, 0)
        assert "ROC: 0.125;" in format_report("x", 0.1245, 0)
        assert "ROC: 0.001;" in format_report("x", 0.0005, 0)

    def test_from_labels(self):
        line = evaluate_format("KNN", [0, 0, 1, 1], [0.1, 0.2, 0.3, 0.4])
        assert line == "KNN Performance; ROC: 1.000; Precision at n: 1.000"


class TestCsv:
    def test_header_detected(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("a,b\n1,2\n3,4.5\n-1e-3,0\n")
        header, values = read_csv(p)
        assert header == ["a", "b"]
        assert values.tolist() == [[1, 2], [3, 4.5], [-0.001, 0]]

    def test_no_header_crlf(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_bytes(b"1,2\r\n3,4\r\n")
        header, values = read_csv(p)
        assert header is None and values.shape == (2, 2)

    def test_ragged_row(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1,2\n3\n")
        with pytest.raises(DataError, match="line 2"):
            read_csv(p)

    def test_non_numeric(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("a,b\n1,2\n3,oops\n")
        with pytest.raises(DataError, match="line 3"):
            read_csv(p)

    def test_non_finite(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1,2\n3,nan\n")
        with pytest.raises(DataError, match="line 2"):
            read_csv(p)

    def test_scores_round_trip(self, tmp_path, rng):
        p = tmp_path / "s.csv"
        scores = rng.normal(size=50) * 1e3
        labels = (scores > 0).astype(int)
        probs = rng.random(50)
        write_scores_csv(p, scores, labels, probs)
        assert p.read_text().splitlines()[0] == "score,label,proba"
        back = read_scores_csv(p)
        assert np.array_equal(back["score"], scores)
        assert np.array_equal(back["label"], labels)
        assert np.array_equal(back["proba"], probs)
        assert b"\r" not in p.read_bytes()

    def test_matrix_and_labels_round_trip(self, tmp_path, rng):
        X = rng.normal(size=(10, 3))
        y = np.array([0] * 8 + [1] * 2)
        write_matrix_csv(tmp_path / "X.csv", X)
        write_labels_csv(tmp_path / "y.csv", y)
        ds = read_labeled_csv(tmp_path / "X.csv", tmp_path / "y.csv")
        assert np.array_equal(ds.X, X) and np.array_equal(ds.y, y)
        assert np.array_equal(read_labels_csv(tmp_path / "y.csv"), y)

    def test_label_column(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("f1,label,f2\n1,0,2\n3,1,4\n5,0,6\n")
        ds = read_labeled_csv(p)
        assert ds.X.tolist() == [[1, 2], [3, 4], [5, 6]]
        assert ds.y.tolist() == [0, 1, 0]

    def test_missing_labels(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1,2\n3,4\n")
        with pytest.raises(DataError):
            read_labeled_csv(p)
