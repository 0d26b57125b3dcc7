import json

import pytest

from bipers.bigraded import Presentation
from bipers.classify import (
    ClassificationReport,
    check_implications,
    classify,
    report_to_dict,
    report_to_json,
    verify_certificate,
)
from bipers.decomposition import hook_decompose
from bipers.generators import RandomSpec, free_module, gallery, random_module
from bipers.resolution import BettiTable


def test_classify_remark1():
    rep = classify(gallery("hook-not-free"))
    assert rep.free is False
    assert rep.hook_decomposable is True
    assert rep.structure_theorem is True
    assert rep.gamma_product is True
    assert rep.projective_dimension == 1
    assert [(h.p, h.q) for h in rep.certificate.hooks] == [((0, 0), (1, 1))]


def test_classify_remark2():
    rep = classify(gallery("pd1-not-hook"))
    assert rep.free is False
    assert rep.hook_decomposable is False
    assert rep.projective_dimension == 1
    assert rep.certificate is None


def test_classify_koszul_point():
    rep = classify(gallery("koszul-point"))
    assert rep.free is False
    assert rep.hook_decomposable is False
    assert rep.projective_dimension == 2


def test_classify_zero_module():
    rep = classify(Presentation(2, [], []))
    assert rep.free and rep.hook_decomposable and rep.projective_dimension == 0
    assert rep.certificate is not None and rep.certificate.hooks == ()


def test_certificate_verifies_for_remark1():
    pres = gallery("hook-not-free")
    rep = classify(pres)
    assert verify_certificate(pres, rep.certificate)


def test_certificate_rejected_on_wrong_module():
    cert = classify(gallery("hook-not-free")).certificate
    assert not verify_certificate(gallery("koszul-point"), cert)


def test_hand_built_certificate_for_free_module():
    pres = free_module([(0, 0)])
    cert = hook_decompose(pres)
    assert verify_certificate(pres, cert)


def test_smith_diagonal_presentation():
    rep = classify(gallery("remark2-hilbert-twin"))
    diag = rep.certificate.diagonal_presentation()
    assert diag.gens == ((0, 1), (1, 0))
    assert diag.rels == ((1, 1),)
    assert diag.coeffs.a.tolist() == [[1], [0]]


# ----------------------------------------------------------- implications


def _report(free, hook, pd):
    return ClassificationReport(
        free=free,
        hook_decomposable=hook,
        structure_theorem=hook,
        gamma_product=hook,
        projective_dimension=pd,
        betti=BettiTable((), (), ()),
        certificate=None,
        field_modulus=2,
        box=(1, 1),
    )


def test_implications_consistent_report():
    assert check_implications(_report(True, True, 0))


def test_implications_free_requires_hook():
    rep = _report(True, False, 0)
    assert not check_implications(rep)


def test_implications_hook_requires_pd_le_1():
    rep = _report(False, True, 2)
    assert not check_implications(rep)


def test_implications_free_iff_pd_zero():
    assert not check_implications(_report(False, True, 0))
    assert not check_implications(_report(True, True, 1))


def test_implications_equivalence_of_three():
    rep = _report(False, True, 1)
    rep.gamma_product = False
    assert not check_implications(rep)


@pytest.mark.parametrize("seed", range(30))
def test_every_classification_obeys_the_diagram(seed):
    pres = random_module(RandomSpec("arbitrary", seed=1100 + seed))
    assert check_implications(classify(pres))


def test_converse_failure_witnesses():
    hook_not_free = classify(gallery("hook-not-free"))
    assert hook_not_free.hook_decomposable and not hook_not_free.free
    pd1_not_hook = classify(gallery("pd1-not-hook"))
    assert pd1_not_hook.projective_dimension <= 1 and not pd1_not_hook.hook_decomposable


# ------------------------------------------------------------ serialization


def test_report_json_shape():
    out = report_to_dict(classify(gallery("hook-not-free")))
    assert out["betti"] == {"0": [[0, 0, 1]], "1": [[1, 1, 1]], "2": []}
    assert out["certificate"]["hooks"] == [{"p": [0, 0], "q": [1, 1]}]
    assert out["projective_dimension"] == 1
    assert "timings" in out


def test_report_json_inf_encoding():
    out = report_to_dict(classify(free_module([(2, 3)])))
    assert out["certificate"]["hooks"] == [{"p": [2, 3], "q": ["inf", "inf"]}]


def test_classify_deterministic_json():
    pres = random_module(RandomSpec("hook_sum_scrambled", seed=5))
    a = report_to_json(classify(pres), include_timings=False)
    b = report_to_json(classify(pres), include_timings=False)
    assert a == b
    json.loads(a)  # valid JSON
