import json
import os

import numpy as np
import pytest

from rfdm import cli
from rfdm.evaluate import roc
from rfdm.importance import gini
from rfdm.manifold import eigenmap
from rfdm.tools import dataset


@pytest.fixture
def study_files(tmp_path):
    rng = np.random.default_rng(0)
    ids = ['s%d' % i for i in range(30)]
    x = rng.integers(0, 3, size=(30, 8))
    y = np.stack([x[:, 0] * x[:, 1], rng.normal(size=30)], axis=1).astype(float)
    genotypes = str(tmp_path / 'genotypes.csv')
    vectors = str(tmp_path / 'vectors.csv')
    labels = str(tmp_path / 'labels.csv')
    dataset.save_genotypes(
        dataset.GenotypeMatrix(x, snp_ids=['rs%d' % (i + 1) for i in range(8)], subject_ids=ids), genotypes,
    )
    dataset.save_vectors(y, vectors, subject_ids=ids)
    dataset.save_labels((y[:, 0] > 1).astype(int), labels, subject_ids=ids)
    return tmp_path, genotypes, vectors, labels


def test_usage_errors():
    assert cli.main([]) == 1
    assert cli.main(['no-such-command']) == 1
    assert cli.main(['distance', '--in', 'vectors.csv']) == 1
    assert cli.main(['distance', '--metric', 'cosine', '--in', 'a', '--out', 'b']) == 1


def test_data_errors(tmp_path):
    out = str(tmp_path / 'd.csv')
    assert cli.main(['distance', '--in', str(tmp_path / 'missing.csv'), '--out', out]) == 2

    bad = tmp_path / 'bad.csv'
    bad.write_text('subject_id,roi1\ns0,1.0\ns1,x\n')
    assert cli.main(['distance', '--in', str(bad), '--out', out]) == 2
    assert not os.path.exists(out)


def test_numerical_error(tmp_path):
    similarity = str(tmp_path / 'w.csv')
    dataset.save_matrix(np.ones((6, 6)), similarity)
    assert cli.main(['embed', '--similarity', similarity, '--out', str(tmp_path / 'e.csv')]) == 3


def test_forest_flow(study_files):
    tmp_path, genotypes, vectors, labels = study_files
    d = str(tmp_path / 'd.csv')
    forest = str(tmp_path / 'forest.bin')
    snps = str(tmp_path / 'snps.tsv')
    pairs = str(tmp_path / 'pairs.tsv')

    assert cli.main(['distance', '--metric', 'euclidean', '--in', vectors, '--out', d]) == 0
    assert dataset.load_distances(d).n == 30
    assert cli.main(['train', '--genotypes', genotypes, '--distances', d, '--trees', '5',
                     '--max-depth', '4', '--out', forest]) == 0
    assert cli.main(['rank-snps', '--forest', forest, '--out', snps]) == 0
    assert cli.main(['rank-pairs', '--forest', forest, '--variant', 'absolute', '--out', pairs]) == 0

    ranked = gini.load_ranking(snps)
    assert sorted(item for item, _ in ranked) == ['rs%d' % (i + 1) for i in range(8)]
    assert len(gini.load_ranking(pairs)) == 28

    proximity = str(tmp_path / 'proximity.csv')
    assert cli.main(['proximity', '--forest', forest, '--genotypes', genotypes, '--out', proximity]) == 0
    w = dataset.load_matrix(proximity)
    assert w.shape == (30, 30)
    np.testing.assert_array_equal(np.diag(w), 1.0)
    stored = str(tmp_path / 'proximity-stored.csv')
    assert cli.main(['proximity', '--forest', forest, '--out', stored]) == 0
    np.testing.assert_array_equal(dataset.load_matrix(stored), w)

    truth = tmp_path / 'truth.json'
    truth.write_text(json.dumps({'causal_snps': ['rs1', 'rs2'], 'causal_pairs': [['rs2', 'rs1']]}))
    for ranking, name in ((snps, 'roc-snps.csv'), (pairs, 'roc-pairs.csv')):
        assert cli.main(['roc', '--ranking', ranking, '--truth', str(truth), '--out', str(tmp_path / name)]) == 0
    curve = roc.load_roc(str(tmp_path / 'roc-snps.csv'))
    assert curve.points[-1] == (1.0, 1.0)

    svg = str(tmp_path / 'roc.svg')
    assert cli.main(['plot', '--in', str(tmp_path / 'roc-snps.csv'), str(tmp_path / 'roc-pairs.csv'),
                     '--labels', 'snps,pairs', '--out', svg]) == 0
    assert os.path.getsize(svg) > 0


def test_labels_and_fusion(study_files):
    tmp_path, _, vectors, labels = study_files
    a = str(tmp_path / 'a.csv')
    b = str(tmp_path / 'b.csv')
    fused = str(tmp_path / 'fused.csv')
    assert cli.main(['distance', '--in', vectors, '--out', a]) == 0
    assert cli.main(['distance', '--metric', 'discrete', '--in', labels, '--out', b]) == 0
    assert cli.main(['combine', '--weights', '0.5,0.5', '--in', a, b, '--out', fused]) == 0
    expected = 0.5 * dataset.load_distances(a).values + 0.5 * dataset.load_distances(b).values
    np.testing.assert_allclose(dataset.load_distances(fused).values, expected)
    assert cli.main(['combine', '--weights', '0.5,0.6', '--in', a, b, '--out', fused]) == 2


def test_embed_and_penetrance_plot(tmp_path):
    rng = np.random.default_rng(1)
    w = rng.uniform(0.1, 1.0, size=(12, 12))
    w = 0.5 * (w + w.T)
    np.fill_diagonal(w, 1.0)
    similarity = str(tmp_path / 'w.csv')
    coords = str(tmp_path / 'coords.csv')
    dataset.save_matrix(w, similarity)
    assert cli.main(['embed', '--similarity', similarity, '--dims', '2', '--out', coords]) == 0
    assert dataset.load_table(coords)[2].shape == (12, 2)

    svg = str(tmp_path / 'penetrance.svg')
    assert cli.main(['penetrance-plot', '--penetrances', '0.2,0.35', '--out', svg]) == 0
    assert os.path.isfile(svg)


def test_simulate(tmp_path):
    config = tmp_path / 'sim.json'
    config.write_text(json.dumps({
        'population': {'n_founders': 50, 'n_generations': 5, 'final_size': 400, 'n_loci': 60},
        'disease': {'n_roi': 20, 'n_disease_roi': 4, 'n_spurious_roi': 4},
        'phenotype': {'n_cov_roi': 5},
        'study': {'n_subjects': 40},
    }))
    out = str(tmp_path / 'study')
    assert cli.main(['simulate', '--config', str(config), '--seed', '4', '--out-dir', out]) == 0
    for name in ('genotypes.csv', 'vectors.csv', 'labels.csv', 'truth.json', 'covariances', 'graphs'):
        assert os.path.exists(os.path.join(out, name))
    assert dataset.load_genotypes(os.path.join(out, 'genotypes.csv')).n_subjects == 40
    with open(os.path.join(out, 'truth.json')) as f:
        truth = json.load(f)
    assert truth['seed'] == 4
    assert len(truth['causal_pairs']) == 8

    bad = tmp_path / 'bad.json'
    bad.write_text(json.dumps({'popuation': {}}))
    assert cli.main(['simulate', '--config', str(bad), '--out-dir', out]) == 2


def test_trte_with_distances(study_files):
    tmp_path, _, vectors, _ = study_files
    coords = str(tmp_path / 'coords.csv')
    d = str(tmp_path / 'd_trte.csv')
    assert cli.main(['trte', '--vectors', vectors, '--trees', '50', '--max-depth', '3', '--seed', '2',
                     '--out', coords, '--distances-out', d]) == 0
    ids, e = eigenmap.load_embedding(coords)
    assert ids == ['s%d' % i for i in range(30)]
    expected = eigenmap.embedding_distances(e).values
    np.testing.assert_allclose(dataset.load_distances(d).values, expected, atol=1e-12)
