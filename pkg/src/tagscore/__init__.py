"""Tagger evaluation and annotator agreement over hierarchical (IS-A) tag sets."""
from .agreement import (AgreementError, AnnotationPair, KappaReport, UndefinedKappaError,
                        annotation_leaf_distribution, kappa, kappa_run, pr_agreement,
                        pr_chance)
from .formats import (ParseError, format_answers, format_inventory, format_key,
                      parse_answer_file, parse_inventory_file, parse_key_file)
from .scoring import (Instance, InstanceScore, OutputDistribution, ScoreReport,
                      ScoringError, exact_match_score, leaf_mass_score,
                      make_distribution, normalize_output, score_instance, score_run)
from .tagtree import (InventoryError, LeafDistribution, LexemeTree, TagInventory,
                      TagNode, UnknownTagError, build_inventory, canonicalize_tag_set,
                      distribute_to_leaves, downward_probability, is_ancestor_or_equal,
                      leaves_under)

__version__ = "0.1.0"
