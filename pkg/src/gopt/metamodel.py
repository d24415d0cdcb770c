"""Loading and diffing of Ecore-subset metamodels.

The loader understands a deliberately small slice of Ecore XMI: one EPackage
(optionally with nested subpackages, which are flattened), EClass, EEnum and
EDataType classifiers, and EAttribute/EReference structural features with
name, type, bounds and containment.  Anything outside the slice is rejected
loudly rather than guessed at; in particular bidirectional references
(eOpposite) are not supported.

Types may be written as `#//Name` fragments, as `prefix:Kind http://...#//Name`
pairs, or as nested eType/eSuperTypes elements with an href.  Resolution is
against the package's own classifiers plus the built-in primitives.
"""

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

BUILTIN_TYPES = ("EString", "EInt", "EBoolean", "EFloat", "EDouble")


class MetamodelError(ValueError):
    """Problem with metamodel content."""


class MalformedXmlError(MetamodelError):
    """Input is not parseable XML or not an Ecore package."""


class MissingNamespaceError(MetamodelError):
    """EPackage lacks a name or nsURI."""


class UnresolvedTypeError(MetamodelError):
    """A feature or supertype points at an unknown classifier."""


class OppositeReferenceError(MetamodelError):
    """Bidirectional references are outside the supported subset."""


class DuplicateClassifierError(MetamodelError):
    """Two classifiers (possibly from different subpackages) share a name."""


@dataclass
class Feature:
    name: str
    kind: str  # "attribute" | "reference"
    type_name: str
    lower: int = 0
    upper: int = 1  # -1 means unbounded
    containment: bool = False

    def bounds(self) -> str:
        return f"{self.lower}..{self.upper}"

    def shape(self) -> tuple:
        """Identity used for rename-candidate matching."""
        return (self.kind, self.type_name, self.lower, self.upper, self.containment)


@dataclass
class Classifier:
    name: str
    kind: str  # "class" | "enum" | "datatype"
    abstract: bool = False
    supertypes: list[str] = field(default_factory=list)
    features: list[Feature] = field(default_factory=list)
    literals: list[str] = field(default_factory=list)

    def feature(self, name: str) -> Feature | None:
        for f in self.features:
            if f.name == name:
                return f
        return None


@dataclass
class Metamodel:
    name: str
    ns_uri: str
    classifiers: list[Classifier] = field(default_factory=list)

    def classifier(self, name: str) -> Classifier | None:
        for c in self.classifiers:
            if c.name == name:
                return c
        return None


# --- XMI loading ----------------------------------------------------------

def _local(tag) -> str:
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def _xsi_type(el) -> str | None:
    for key, value in el.attrib.items():
        if _local(key) == "type":
            return value.rsplit(":", 1)[-1]
    return None


_FRAGMENT = re.compile(r"#//([A-Za-z_]\w*)$")


def _type_token_to_name(token: str) -> str | None:
    token = token.strip()
    if not token:
        return None
    m = _FRAGMENT.search(token)
    if m:
        return m.group(1)
    if re.fullmatch(r"[A-Za-z_]\w*", token):
        return token
    return None


def _resolve_type(el, context: str) -> str:
    """Extract the referenced type name from eType (attribute or child form)."""
    token = el.get("eType")
    if token is None:
        for child in el:
            if _local(child.tag) == "eType":
                token = child.get("href") or child.get("eType")
                break
    if token is None:
        raise UnresolvedTypeError(f"{context}: no eType given")
    # attribute form may be a "prefix:Kind uri#//Name" pair; use the last token
    name = _type_token_to_name(token.split()[-1])
    if name is None:
        raise UnresolvedTypeError(f"{context}: unintelligible eType {token!r}")
    return name


def _supertype_names(el) -> list[str]:
    names: list[str] = []
    attr = el.get("eSuperTypes")
    if attr:
        for token in attr.split():
            name = _type_token_to_name(token)
            if name:
                names.append(name)
    for child in el:
        if _local(child.tag) == "eSuperTypes":
            token = child.get("href")
            if token:
                name = _type_token_to_name(token.split()[-1])
                if name:
                    names.append(name)
    return names


def _load_feature(el, owner: str) -> Feature:
    xsi = _xsi_type(el)
    if xsi not in ("EAttribute", "EReference"):
        raise MalformedXmlError(f"{owner}: unsupported feature kind {xsi!r}")
    name = el.get("name")
    if not name:
        raise MalformedXmlError(f"{owner}: feature without a name")
    if el.get("eOpposite") is not None or any(_local(c.tag) == "eOpposite" for c in el):
        raise OppositeReferenceError(
            f"{owner}.{name}: eOpposite is not supported (bidirectional reference)"
        )
    return Feature(
        name=name,
        kind="attribute" if xsi == "EAttribute" else "reference",
        type_name=_resolve_type(el, f"{owner}.{name}"),
        lower=int(el.get("lowerBound", "0")),
        upper=int(el.get("upperBound", "1")),
        containment=el.get("containment") == "true",
    )


def _load_classifier(el) -> Classifier:
    xsi = _xsi_type(el)
    name = el.get("name")
    if not name:
        raise MalformedXmlError("classifier without a name")
    if xsi == "EClass":
        features = [
            _load_feature(child, name)
            for child in el
            if _local(child.tag) == "eStructuralFeatures"
        ]
        return Classifier(
            name=name,
            kind="class",
            abstract=el.get("abstract") == "true",
            supertypes=_supertype_names(el),
            features=features,
        )
    if xsi == "EEnum":
        literals = [
            child.get("name")
            for child in el
            if _local(child.tag) == "eLiterals" and child.get("name")
        ]
        return Classifier(name=name, kind="enum", literals=literals)
    if xsi == "EDataType":
        return Classifier(name=name, kind="datatype")
    raise MalformedXmlError(f"unsupported classifier kind {xsi!r} for {name!r}")


def _collect_packages(pkg) -> list:
    """Package-then-document order: a package before its subpackages."""
    out = [pkg]
    for child in pkg:
        if _local(child.tag) == "eSubpackages":
            out.extend(_collect_packages(child))
    return out


def load_metamodel(xml_text: str) -> Metamodel:
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedXmlError(f"not parseable XML: {exc}") from exc

    if _local(root.tag) == "EPackage":
        pkg = root
    else:
        pkg = next((el for el in root.iter() if _local(el.tag) == "EPackage"), None)
        if pkg is None:
            raise MalformedXmlError("no EPackage element found")

    name = pkg.get("name")
    ns_uri = pkg.get("nsURI")
    if not name or not ns_uri:
        raise MissingNamespaceError("EPackage needs both a name and an nsURI")

    classifiers: list[Classifier] = []
    seen: set[str] = set()
    for package in _collect_packages(pkg):
        for child in package:
            if _local(child.tag) != "eClassifiers":
                continue
            classifier = _load_classifier(child)
            if classifier.name in seen:
                raise DuplicateClassifierError(
                    f"classifier name {classifier.name!r} appears more than once"
                )
            seen.add(classifier.name)
            classifiers.append(classifier)

    known = seen | set(BUILTIN_TYPES)
    for classifier in classifiers:
        for super_name in classifier.supertypes:
            if super_name not in seen:
                raise UnresolvedTypeError(
                    f"{classifier.name}: unknown supertype {super_name!r}"
                )
        for feat in classifier.features:
            if feat.type_name not in known:
                raise UnresolvedTypeError(
                    f"{classifier.name}.{feat.name}: unknown type {feat.type_name!r}"
                )

    return Metamodel(name=name, ns_uri=ns_uri, classifiers=classifiers)


# --- feature collection (inheritance) ------------------------------------

def collected_features(mm: Metamodel, cls: Classifier) -> list[Feature]:
    """Inherited features first (depth-first over supertypes, declaration
    order), then the class's own, deduplicated by name (first wins)."""
    out: list[Feature] = []
    taken: set[str] = set()
    visited: set[str] = set()

    def visit(c: Classifier) -> None:
        if c.name in visited:
            return
        visited.add(c.name)
        for super_name in c.supertypes:
            parent = mm.classifier(super_name)
            if parent is not None:
                visit(parent)
        if c is not cls:
            _take(c)

    def _take(c: Classifier) -> None:
        for f in c.features:
            if f.name not in taken:
                taken.add(f.name)
                out.append(f)

    visit(cls)
    _take(cls)
    return out


# --- diffing --------------------------------------------------------------

@dataclass(frozen=True)
class Change:
    kind: str
    class_name: str
    feature: str | None = None
    frm: str = ""
    to: str = ""


_MIRROR = {
    "class-added": "class-removed",
    "class-removed": "class-added",
    "feature-added": "feature-removed",
    "feature-removed": "feature-added",
    "feature-renamed": "feature-renamed",
    "bound-changed": "bound-changed",
    "supertype-changed": "supertype-changed",
}


def mirrored(change: Change) -> Change:
    """The entry diff(b, a) would contain for this diff(a, b) entry."""
    kind = _MIRROR[change.kind]
    feature = change.feature
    if change.kind == "feature-renamed":
        feature = change.to or feature
    return Change(kind, change.class_name, feature, frm=change.to, to=change.frm)


def diff_metamodels(a: Metamodel, b: Metamodel) -> list[Change]:
    changes: list[Change] = []
    names_a = [c.name for c in a.classifiers]
    names_b = [c.name for c in b.classifiers]
    set_a, set_b = set(names_a), set(names_b)

    for name in names_a:
        if name not in set_b:
            changes.append(Change("class-removed", name))
    for name in names_b:
        if name not in set_a:
            changes.append(Change("class-added", name))

    for name in names_a:
        if name not in set_b:
            continue
        ca, cb = a.classifier(name), b.classifier(name)
        if ca.supertypes != cb.supertypes:
            changes.append(
                Change(
                    "supertype-changed",
                    name,
                    frm=",".join(ca.supertypes),
                    to=",".join(cb.supertypes),
                )
            )
        feats_a = {f.name for f in ca.features}
        feats_b = {f.name for f in cb.features}

        removed = [f for f in ca.features if f.name not in feats_b]
        added = [f for f in cb.features if f.name not in feats_a]

        # Same class, same shape: report the pair as a rename candidate.
        for gone in list(removed):
            match = next((g for g in added if g.shape() == gone.shape()), None)
            if match is not None:
                removed.remove(gone)
                added.remove(match)
                changes.append(
                    Change("feature-renamed", name, gone.name, frm=gone.name, to=match.name)
                )
        for f in removed:
            changes.append(Change("feature-removed", name, f.name))
        for f in added:
            changes.append(Change("feature-added", name, f.name))

        for fa in ca.features:
            fb = cb.feature(fa.name)
            if fb is None:
                continue
            if (fa.kind, fa.type_name, fa.containment) != (fb.kind, fb.type_name, fb.containment):
                # A retyped feature is easiest to act on as a remove/add pair.
                changes.append(Change("feature-removed", name, fa.name))
                changes.append(Change("feature-added", name, fb.name))
            elif (fa.lower, fa.upper) != (fb.lower, fb.upper):
                changes.append(
                    Change("bound-changed", name, fa.name, frm=fa.bounds(), to=fb.bounds())
                )

    return changes
