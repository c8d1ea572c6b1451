use std::fmt;

use crate::formula::{LanguageFragment, Tense};

use super::schema::{catalog, rule, Rule, Schema, IPC_BASIS};
use super::HilbertError;

/// The eight base logics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseLogic {
    Itl,
    Itl0,
    Etl,
    Rtl,
    Cdtl,
    ItlPlus,
    EtlPlus,
    CdtlPlus,
}

impl BaseLogic {
    pub const ALL: [BaseLogic; 8] = [
        BaseLogic::Itl,
        BaseLogic::Itl0,
        BaseLogic::Etl,
        BaseLogic::Rtl,
        BaseLogic::Cdtl,
        BaseLogic::ItlPlus,
        BaseLogic::EtlPlus,
        BaseLogic::CdtlPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseLogic::Itl => "ITL",
            BaseLogic::Itl0 => "ITL0",
            BaseLogic::Etl => "ETL",
            BaseLogic::Rtl => "RTL",
            BaseLogic::Cdtl => "CDTL",
            BaseLogic::ItlPlus => "ITL+",
            BaseLogic::EtlPlus => "ETL+",
            BaseLogic::CdtlPlus => "CDTL+",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        BaseLogic::ALL.into_iter().find(|b| b.name() == s)
    }

    /// Axioms added to the common core.
    fn extras(self) -> &'static [&'static str] {
        match self {
            BaseLogic::Itl | BaseLogic::Itl0 => &[],
            BaseLogic::Etl => &["cd-minus"],
            BaseLogic::Rtl => &["cd-minus", "cem"],
            BaseLogic::Cdtl => &["cd"],
            BaseLogic::ItlPlus => &["fs-nex"],
            BaseLogic::EtlPlus => &["fs-nex", "cd-minus"],
            BaseLogic::CdtlPlus => &["fs-nex", "cd"],
        }
    }

    /// Whether the weak rendering starts from the core with `wh` in place
    /// of `box-fix`.
    fn weak_uses_wh(self) -> bool {
        matches!(self, BaseLogic::Itl | BaseLogic::Itl0 | BaseLogic::Etl | BaseLogic::Rtl)
    }
}

/// Language variant selected by the name suffix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `.db`: `<>` and `[]`.
    DiamondBox,
    /// `.dw`: `<>` and `[*]`.
    DiamondWeak,
    /// `.b`: `[]` only.
    Box,
    /// `.w`: `[*]` only.
    Weak,
    /// `.d`: `<>` only.
    Diamond,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::DiamondBox, Variant::DiamondWeak, Variant::Box, Variant::Weak, Variant::Diamond];

    pub fn suffix(self) -> &'static str {
        match self {
            Variant::DiamondBox => "db",
            Variant::DiamondWeak => "dw",
            Variant::Box => "b",
            Variant::Weak => "w",
            Variant::Diamond => "d",
        }
    }

    pub fn is_weak(self) -> bool {
        matches!(self, Variant::DiamondWeak | Variant::Weak)
    }

    pub fn fragment(self) -> LanguageFragment {
        match self {
            Variant::DiamondBox => LanguageFragment::DIAMOND_BOX,
            Variant::DiamondWeak => LanguageFragment::DIAMOND_WEAK,
            Variant::Box => LanguageFragment::BOX,
            Variant::Weak => LanguageFragment::WEAK,
            Variant::Diamond => LanguageFragment::DIAMOND,
        }
    }
}

/// Rendering of the henceforth operator in a logic's surface language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoxRendering {
    Strong,
    Weak,
}

/// Axioms and rules of one named logic. Weak-rendered logics store the
/// strong-box axioms of the logic they translate; derivations are mapped to
/// the strong box before checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicSpec {
    pub name: String,
    pub base: BaseLogic,
    pub variant: Variant,
    pub axioms: Vec<&'static Schema>,
    pub rules: Vec<&'static Rule>,
    /// Fragment every line must belong to, in the surface rendering.
    pub fragment: LanguageFragment,
    pub rendering: BoxRendering,
}

impl LogicSpec {
    /// Parses names such as `ITL`, `CDTL+.b` or `ETL.dw`. A missing suffix
    /// means `.db`.
    pub fn parse(name: &str) -> Result<Self, HilbertError> {
        let unknown = || HilbertError::UnknownLogic(name.to_string());
        let (base, suffix) = match name.rsplit_once('.') {
            Some((b, s)) => (b, s),
            None => (name, "db"),
        };
        let base = BaseLogic::from_name(base).ok_or_else(unknown)?;
        let variant = Variant::ALL.into_iter().find(|v| v.suffix() == suffix).ok_or_else(unknown)?;
        Ok(Self::new(base, variant))
    }

    pub fn new(base: BaseLogic, variant: Variant) -> Self {
        let use_wh = base == BaseLogic::Itl0 || (variant.is_weak() && base.weak_uses_wh());
        let mut names: Vec<&str> = vec![
            "nex-bot", "nex-and", "nex-or", "k-nex", "k-box", "k-dia", "box-refl", "box-fix", "dia-refl", "dia-fix",
            "ind-box", "ind-dia",
        ];
        if use_wh {
            names.retain(|n| *n != "box-fix");
            names.push("wh");
        }
        names.extend(base.extras());
        let has_cd = names.contains(&"cd");
        names.extend(IPC_BASIS);
        let mut axioms: Vec<&'static Schema> =
            names.iter().map(|n| catalog().iter().find(|s| s.name == *n).expect("catalog entry")).collect();
        let rule_names: &[&str] = match variant {
            Variant::DiamondBox | Variant::DiamondWeak => &["mp", "nec-next", "nec-box"],
            Variant::Box | Variant::Weak => {
                axioms.retain(|s| !s.template.contains_tense(Tense::Eventually));
                if has_cd {
                    axioms.push(catalog().iter().find(|s| s.name == "bi").unwrap());
                }
                &["mp", "nec-next", "nec-box"]
            }
            Variant::Diamond => {
                axioms.retain(|s| !s.template.contains_tense(Tense::StrongBox));
                &["mp", "nec-next", "mono-dia", "ind-dia-rule"]
            }
        };
        LogicSpec {
            name: format!("{}.{}", base.name(), variant.suffix()),
            base,
            variant,
            axioms,
            rules: rule_names.iter().map(|r| rule(r).unwrap()).collect(),
            fragment: variant.fragment(),
            rendering: if variant.is_weak() { BoxRendering::Weak } else { BoxRendering::Strong },
        }
    }

    /// Every logic name the checker accepts.
    pub fn all_names() -> Vec<String> {
        let mut out = Vec::new();
        for b in BaseLogic::ALL {
            for v in Variant::ALL {
                out.push(format!("{}.{}", b.name(), v.suffix()));
            }
        }
        out
    }

    pub fn axiom(&self, name: &str) -> Option<&'static Schema> {
        self.axioms.iter().copied().find(|s| s.answers_to(name))
    }

    pub fn has_axiom(&self, name: &str) -> bool {
        self.axiom(name).is_some()
    }

    pub fn rule(&self, name: &str) -> Option<&'static Rule> {
        self.rules.iter().copied().find(|r| r.name == name)
    }

    /// Fragment of the strong-box form checked internally.
    pub fn strong_fragment(&self) -> LanguageFragment {
        let mut f = self.fragment;
        if f.weak_box {
            f.weak_box = false;
            f.strong_box = true;
        }
        f
    }

    /// Axioms other than the IPC basis.
    pub fn temporal_axioms(&self) -> Vec<&'static Schema> {
        self.axioms.iter().copied().filter(|s| !IPC_BASIS.contains(&s.name)).collect()
    }
}

impl fmt::Display for LogicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
