import numpy as np
import pytest

from rfdm import errors
from rfdm.tools import dataset
from rfdm.tools import utils


def test_genotypes_reject_bad_cell():
    with pytest.raises(errors.MalformedCell) as e:
        dataset.GenotypeMatrix([[0, 1], [3, 2]])
    assert (e.value.row, e.value.col) == (1, 0)


def test_genotypes_reject_duplicate_ids():
    with pytest.raises(errors.DuplicateId) as e:
        dataset.GenotypeMatrix([[0, 1], [1, 2]], snp_ids=['rs1', 'rs1'])
    assert e.value.identifier == 'rs1'


def test_genotypes_are_read_only():
    g = dataset.GenotypeMatrix([[0, 1], [1, 2]])
    with pytest.raises(ValueError):
        g.values[0, 0] = 2


def test_genotypes_file(tmp_path):
    g = dataset.GenotypeMatrix([[0, 1, 2], [2, 1, 0], [1, 1, 1]], snp_ids=['a', 'b', 'c'])
    path = str(tmp_path / 'g.csv')
    dataset.save_genotypes(g, path)
    assert dataset.load_genotypes(path) == g


def test_load_genotypes_names_bad_cell(tmp_path):
    path = tmp_path / 'g.csv'
    path.write_text('subject_id,rs1,rs2\ns0,0,1\ns1,x,2\n')
    with pytest.raises(errors.MalformedCell) as e:
        dataset.load_genotypes(str(path))
    assert (e.value.row, e.value.col) == (1, 0)


def test_distance_matrix_validation():
    with pytest.raises(errors.NegativeDistance) as e:
        dataset.validate_distance_matrix([[0, -1], [-1, 0]])
    assert e.value.indices == (0, 1)

    with pytest.raises(errors.NonzeroDiagonal) as e:
        dataset.validate_distance_matrix([[0, 1], [1, 0.5]])
    assert e.value.indices == (1, 1)

    with pytest.raises(errors.AsymmetryAboveTolerance):
        dataset.validate_distance_matrix([[0, 1], [1.001, 0]])

    with pytest.raises(errors.DimensionMismatch):
        dataset.validate_distance_matrix([[0, 1, 2], [1, 0, 1]])


def test_tiny_asymmetry_is_symmetrized():
    d = dataset.validate_distance_matrix([[0, 1.0], [1.0 + 1e-14, 0]])
    assert d.values[0, 1] == d.values[1, 0]


def test_triangle_violation_names_witness():
    with pytest.raises(errors.TriangleViolation) as e:
        dataset.validate_distance_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert e.value.indices == (0, 2)
    assert e.value.via == 1


def test_triangle_sampling_on_large_matrices():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(250, 3))
    d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2))
    assert dataset.validate_distance_matrix(d, seed=1).n == 250


def test_spd_check():
    with pytest.raises(errors.NotPositiveDefinite) as e:
        dataset.check_spd_matrices([np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]])])
    assert e.value.index == 1
    with pytest.raises(errors.DimensionMismatch):
        dataset.check_spd_matrices([np.eye(2), np.eye(3)])


def test_graph_checks():
    with pytest.raises(errors.VertexSetMismatch):
        dataset.check_graphs([dataset.Graph(3, [(0, 1)]), dataset.Graph(4, [(0, 1)])])
    with pytest.raises(errors.DataError):
        dataset.Graph(3, [(1, 1)])
    g = dataset.Graph(4, [(2, 0), (1, 3)], weights=[0.5, 0.0])
    assert g.edge_count == 1
    assert g.edges.tolist() == [[0, 2], [1, 3]]


def test_graph_edges_are_undirected_and_unique():
    g = dataset.Graph(3, [(0, 1), (1, 0), (0, 1), (2, 1)])
    assert g.edge_count == 2
    assert g.edges.tolist() == [[0, 1], [1, 2]]
    with pytest.raises(errors.DataError):
        dataset.Graph(3, [(0, 1), (1, 0)], weights=[0.5, 0.2])


def test_graph_file(tmp_path):
    g = dataset.Graph(5, [(0, 1), (3, 4)])
    path = str(tmp_path / 'g.csv')
    dataset.save_graph(g, path)
    loaded = dataset.load_graph(path)
    assert loaded.n_vertices == 5
    assert loaded.edges.tolist() == [[0, 1], [3, 4]]


def test_response_set_holds_one_variant():
    with pytest.raises(errors.DataError):
        dataset.ResponseSet(vectors=np.zeros((2, 2)), labels=[0, 1])
    r = dataset.ResponseSet(labels=[0, 1, 1])
    assert r.kind == dataset.ResponseSet.LABELS
    assert r.vectors is None
    assert len(r) == 3


def test_dataset_dimension_checks():
    g = dataset.GenotypeMatrix([[0, 1], [1, 2], [2, 2]])
    with pytest.raises(errors.DimensionMismatch):
        dataset.Dataset(g, np.zeros((2, 2)))
    with pytest.raises(errors.DimensionMismatch):
        dataset.Dataset(g, labels=[0, 1])
    ds = dataset.Dataset(g)
    assert ds.discrete
    assert ds.feature_ids == ['snp0', 'snp1']
    assert not dataset.Dataset(np.array([[0.5], [1.0]])).discrete


def test_matrix_bundle(tmp_path):
    mats = [np.eye(3), 2 * np.eye(3)]
    dirname = str(tmp_path / 'covs')
    dataset.save_matrix_bundle(mats, dirname, subject_ids=['a', 'b'])
    ids, loaded = dataset.load_matrix_bundle(dirname)
    assert ids == ['a', 'b']
    np.testing.assert_array_equal(loaded[1], 2 * np.eye(3))


def test_check_weights():
    np.testing.assert_array_equal(utils.check_weights([0.25, 0.75], 2), [0.25, 0.75])
    with pytest.raises(errors.InvalidWeights):
        utils.check_weights([0.5, 0.6], 2)
    with pytest.raises(errors.InvalidWeights):
        utils.check_weights([1.5, -0.5], 2)
    with pytest.raises(errors.InvalidWeights):
        utils.check_weights([1.0], 2)
