"""Deterministic synthetic insurance dataset generator.

Produces the seeding document for the knowledge base: 50 products (5 per
category), 2,490 FAQs, 290 coverage details, 50 policy terms, and 162 pricing
tiers. All text is templated; the only randomness comes from the caller's
seed, so the same seed always yields a byte-identical document.

Row count layout:

* FAQs: 50 per product, except Dental products carry 48 (2,490 total).
  Question themes cycle through deductible, claims, eligibility, renewal,
  and coverage-limit phrasings so every product has at least one FAQ per
  theme.
* coverage_details: products contribute 6/6/6/6/5 rows per category (290).
* policy_terms: exactly one row per product (50).
* pricing_tiers: 3/3/3/3/4 rows per category's products, with one extra
  tier for the lead product of the first two categories (162).
"""

from __future__ import annotations

import json
import random
from typing import Any

CATEGORIES = [
    "Life", "Health", "Auto", "Home", "Travel",
    "Disability", "Dental", "Vision", "Pet", "Business",
]

PRODUCTS_PER_CATEGORY = 5
FAQS_PER_PRODUCT = 50
FAQS_PER_DENTAL_PRODUCT = 48
COVERAGE_ROWS_PER_PRODUCT = [6, 6, 6, 6, 5]
PRICING_ROWS_PER_PRODUCT = [3, 3, 3, 3, 4]
EXTRA_PRICING_CATEGORIES = 2  # lead product of the first two categories gets one more

# Lead product of each category keeps a stable, recognizable name; the other
# four are drawn from per-category brand pools so different seeds produce
# different catalogs.
FLAGSHIP_NAMES = {
    "Life": "SecureLife Premium Term 30",
    "Health": "FamilyCare Advantage Plan",
    "Auto": "SafeDrive Elite",
    "Home": "HomeShield Complete",
    "Travel": "Globetrotter Shield",
    "Disability": "IncomeGuard Pro",
    "Dental": "BrightSmile Plus",
    "Vision": "ClearView Select",
    "Pet": "PawProtect Companion",
    "Business": "BizSecure Premier",
}

_BRANDS = {
    "Life": ["EverTrust", "LegacyLine", "VitaTerm", "NorthStar Life", "Heritage Mutual",
             "BrightFuture", "Cornerstone Life", "Beacon Legacy"],
    "Health": ["WellPath", "CarePoint", "VitalNet", "MediTrust", "HealthBridge",
               "PrimeWell", "NovaCare", "TrueHealth"],
    "Auto": ["RoadSafe", "DriveSure", "AutoHaven", "MileStone", "SwiftCover",
             "LaneGuard", "TorqueShield", "CruiseSecure"],
    "Home": ["HearthStone", "DwellSafe", "RoofLine", "HavenHome", "KeystoneHome",
             "NestSecure", "BrickGuard", "HomesteadOne"],
    "Travel": ["JetSetter", "WanderSafe", "TransitGuard", "VoyagerOne", "NomadCover",
               "SkyBridge", "PassportPlus", "TrailBlazer"],
    "Disability": ["WageShield", "SteadyIncome", "WorkGuard", "AbilityFirst", "PaycheckSafe",
                   "ResilienceOne", "BackstopPro", "EarnersTrust"],
    "Dental": ["PearlCare", "MolarShield", "SmileWorks", "DentaPrime", "OrthoPath",
               "EnamelGuard", "CrownPoint", "FlossFirst"],
    "Vision": ["OptiCare", "LensCrafted", "IrisShield", "FocalPoint", "SightLine",
               "RetinaGuard", "VisionHarbor", "EyeQ"],
    "Pet": ["TailWagger", "FurFriend", "CompanionCare", "WhiskerWell", "BarkSafe",
            "PetHaven", "PawsFirst", "VetBridge"],
    "Business": ["VentureGuard", "TradeSecure", "FirmFoundation", "CommerceShield", "LedgerSafe",
                 "EnterpriseOne", "MainStreetPro", "GrowthAnchor"],
}

_TIERS = ["Essential", "Preferred", "Premier", "Classic", "Signature",
          "Flexible", "Ultimate", "Core", "Family", "Horizon"]

_COVERAGE_TYPES = {
    "Life": ["Death Benefit", "Terminal Illness Rider", "Accidental Death", "Waiver of Premium",
             "Child Term Rider", "Conversion Option"],
    "Health": ["Hospitalization", "Preventive Care", "Prescription Drugs", "Emergency Room",
               "Specialist Visits", "Mental Health Care"],
    "Auto": ["Collision", "Comprehensive", "Bodily Injury Liability", "Uninsured Motorist",
             "Roadside Assistance", "Rental Reimbursement"],
    "Home": ["Dwelling", "Personal Property", "Liability", "Loss of Use",
             "Water Backup", "Detached Structures"],
    "Travel": ["Trip Cancellation", "Emergency Medical", "Baggage Loss", "Trip Interruption",
               "Medical Evacuation", "Travel Delay"],
    "Disability": ["Short-Term Income", "Long-Term Income", "Partial Disability", "Rehabilitation",
                   "Cost-of-Living Rider", "Survivor Benefit"],
    "Dental": ["Preventive Services", "Basic Restorative", "Major Restorative", "Orthodontics",
               "Periodontics", "Oral Surgery"],
    "Vision": ["Annual Exam", "Frames Allowance", "Contact Lenses", "Lens Enhancements",
               "Laser Surgery Discount", "Safety Eyewear"],
    "Pet": ["Accident Care", "Illness Care", "Hereditary Conditions", "Diagnostics",
            "Surgery", "Wellness Visits"],
    "Business": ["General Liability", "Property Damage", "Business Interruption", "Cyber Liability",
                 "Workers Compensation", "Professional Liability"],
}

_FAQ_THEMES = ["deductible", "claims", "eligibility", "renewal", "coverage_limit"]

# Ten phrasings per theme; the per-product FAQ list cycles theme-by-theme so
# any 48-entry prefix still covers every theme.
_FAQ_QUESTIONS = {
    "deductible": [
        "What is the deductible for {name}?",
        "How much do I pay out of pocket before {name} starts paying?",
        "Does {name} have a per-incident deductible?",
        "Can the deductible on {name} be lowered?",
        "Is the {name} deductible annual or per claim?",
        "Does the deductible for {name} apply to every service?",
        "What happens to the {name} deductible after a claim-free year?",
        "Are preventive services under {name} exempt from the deductible?",
        "Is there a family deductible on {name}?",
        "How does the {name} deductible compare across tiers?",
    ],
    "claims": [
        "How do I file a claim under {name}?",
        "How long does a {name} claim take to settle?",
        "What documents does a {name} claim require?",
        "Can I track a {name} claim online?",
        "Is there a deadline for submitting {name} claims?",
        "Who do I call about a denied {name} claim?",
        "Does {name} pay claims by direct deposit?",
        "Can a repair shop bill {name} directly?",
        "What share of {name} claims are approved on first submission?",
        "Does filing a claim change my {name} rate?",
    ],
    "eligibility": [
        "Who is eligible to enroll in {name}?",
        "Is there a medical exam required for {name}?",
        "Can my spouse be added to {name}?",
        "What is the age range for {name} applicants?",
        "Are pre-existing conditions accepted by {name}?",
        "Can part-time employees enroll in {name}?",
        "Does {name} require proof of prior coverage?",
        "Is {name} available in every state?",
        "Can dependents stay on {name} after age 26?",
        "What disqualifies an applicant from {name}?",
    ],
    "renewal": [
        "Does {name} renew automatically?",
        "Will my {name} premium change at renewal?",
        "How far in advance is the {name} renewal notice sent?",
        "Can I cancel {name} at renewal without a fee?",
        "Is there a grace period for {name} renewal payments?",
        "Does {name} guarantee renewal regardless of claims?",
        "Can I switch {name} tiers at renewal?",
        "What happens if I miss the {name} renewal date?",
        "Does loyalty affect the {name} renewal rate?",
        "How do I opt out of {name} auto-renewal?",
    ],
    "coverage_limit": [
        "What is the maximum payout under {name}?",
        "Does {name} have a lifetime coverage limit?",
        "What is the per-incident limit on {name}?",
        "Are there sub-limits inside the {name} coverage?",
        "Can the coverage limit on {name} be increased later?",
        "Does the {name} limit reset every policy year?",
        "What is excluded from the {name} coverage limit?",
        "How does inflation affect the {name} coverage limit?",
        "Is there an out-of-pocket maximum on {name}?",
        "Do riders raise the overall {name} limit?",
    ],
}

_FAQ_ANSWERS = {
    "deductible": (
        "The deductible for {name} is ${deductible} per {period}. Once you have paid that "
        "amount the plan covers eligible costs at the {tier} reimbursement rate of {pct}%. "
        "Choosing a higher deductible reduces the monthly premium by roughly {discount}%, and "
        "claim-free years earn a ${credit} deductible credit that applies automatically at "
        "renewal. The running deductible balance is visible in the member portal, so you always "
        "know how close you are to full coverage."
    ),
    "claims": (
        "Claims for {name} can be filed online, through the mobile app, or by phone, and most are "
        "settled within {days} business days. You will need the policy number, the date of loss, "
        "and supporting receipts or invoices. Approved amounts above ${floor} are paid by direct "
        "deposit, and {pct}% of claims are approved on first submission. A claims specialist is "
        "assigned to anything flagged for manual review and calls within one business day."
    ),
    "eligibility": (
        "{name} accepts applicants aged {age_min} to {age_max}. No medical exam is required below "
        "age {exam_age}; above that a short health questionnaire applies. Spouses and dependents "
        "can be added during enrollment or within {window} days of a qualifying life event, and "
        "coverage is available in {states} states. Group enrollment through an employer waives "
        "the questionnaire entirely when at least ten members join together."
    ),
    "renewal": (
        "{name} renews automatically each policy year unless you opt out at least {notice} days "
        "before the renewal date. Premium adjustments at renewal are capped at {pct}% for "
        "claim-free policyholders, and a {grace}-day grace period applies to renewal payments "
        "before coverage lapses. Tier changes take effect on the renewal date, and the renewal "
        "notice arrives by email and post with a line-by-line comparison to the expiring terms."
    ),
    "coverage_limit": (
        "The overall coverage limit on {name} is ${limit} per policy year, with a per-incident "
        "cap of ${incident}. The limit resets every year and can be raised at renewal in "
        "${step} increments. Out-of-pocket spending is capped at ${oop} per year, after which "
        "eligible costs are covered in full. Any unused portion of a rider's sub-limit is "
        "reported on the annual statement for easy budgeting."
    ),
}

_DESCRIPTION_TEMPLATE = (
    "{name} is a {category_lower} insurance product built for {audience}. It combines "
    "{feature_a} with {feature_b}, backed by 24/7 claims support and a straightforward "
    "digital enrollment flow. Policyholders can tailor limits and riders to fit their "
    "budget, and {perk} is included on every tier at no extra charge."
)

_AUDIENCES = ["young families", "first-time buyers", "frequent travelers", "small-business owners",
              "budget-conscious households", "self-employed professionals", "growing teams",
              "multi-vehicle households", "long-term planners", "pet parents"]
_FEATURES = ["flexible deductible options", "guaranteed renewal terms", "multi-policy discounts",
             "accident forgiveness", "wellness rewards", "fast digital claims",
             "customizable rider packages", "nationwide provider networks",
             "usage-based pricing", "bundled family coverage"]
_PERKS = ["identity-theft monitoring", "a 24/7 nurse hotline", "roadside assistance",
          "an annual coverage review", "a no-claims cashback credit", "telehealth access",
          "emergency travel assistance", "a dedicated claims concierge"]

_CONDITION_CLAUSES = [
    "Coverage applies after a {wait}-day waiting period",
    "A police or incident report is required within {wait} days",
    "Losses must be reported within {wait} days of occurrence",
    "An approved provider must perform the service",
    "Coverage is secondary to any employer-sponsored plan",
    "Pre-authorization is required for non-emergency care",
]
_CONDITION_TAILS = [
    "and benefits reduce by 50% outside the service network.",
    "and a {pct}% coinsurance applies after the deductible.",
    "with no depreciation applied during the first {years} years.",
    "unless the loss results from an excluded peril listed in the policy.",
    "and unused benefit does not roll over to the next year.",
    "subject to the per-incident cap shown on the declarations page.",
]

_TERM_LENGTHS = ["12 months", "24 months", "36 months", "6 months", "annual, evergreen"]
_RENEWAL_TEMPLATE = (
    "Renews automatically each term; rate adjustments are capped at {pct}% for claim-free "
    "policyholders and a {notice}-day written notice precedes any change in terms."
)
_CANCELLATION_TEMPLATE = (
    "Cancel any time with {notice} days notice; premiums are refunded pro rata after a "
    "${fee} administrative fee, waived during the first {window} days of coverage."
)


def generate_synthetic_dataset(seed: int) -> dict[str, list[dict[str, Any]]]:
    """Build the full dataset document for ``seed``.

    Returns a dict with top-level arrays ``products``, ``coverage_details``,
    ``policy_terms``, ``faqs``, ``pricing_tiers``.
    """
    rng = random.Random(seed)
    products: list[dict[str, Any]] = []
    coverage: list[dict[str, Any]] = []
    terms: list[dict[str, Any]] = []
    faqs: list[dict[str, Any]] = []
    pricing: list[dict[str, Any]] = []

    product_id = 0
    for cat_index, category in enumerate(CATEGORIES):
        names = [FLAGSHIP_NAMES[category]]
        brand_pool = [f"{brand} {tier}" for brand in _BRANDS[category] for tier in _TIERS]
        names.extend(rng.sample(brand_pool, PRODUCTS_PER_CATEGORY - 1))

        for slot, name in enumerate(names):
            product_id += 1
            products.append(_make_product(rng, product_id, name, category))
            coverage.extend(_make_coverage(rng, product_id, category,
                                           COVERAGE_ROWS_PER_PRODUCT[slot], len(coverage)))
            terms.append(_make_policy_term(rng, product_id, len(terms)))
            faq_count = FAQS_PER_DENTAL_PRODUCT if category == "Dental" else FAQS_PER_PRODUCT
            faqs.extend(_make_faqs(rng, product_id, name, faq_count, len(faqs)))
            tier_count = PRICING_ROWS_PER_PRODUCT[slot]
            if slot == 0 and cat_index < EXTRA_PRICING_CATEGORIES:
                tier_count += 1
            pricing.extend(_make_pricing(rng, product_id, tier_count, len(pricing)))

    return {
        "products": products,
        "coverage_details": coverage,
        "policy_terms": terms,
        "faqs": faqs,
        "pricing_tiers": pricing,
    }


def dataset_to_json(dataset: dict[str, list[dict[str, Any]]]) -> str:
    return json.dumps(dataset, indent=2)


def _money(rng: random.Random, low_cents: int, high_cents: int) -> float:
    return rng.randrange(low_cents, high_cents) / 100.0


def _make_product(rng: random.Random, pid: int, name: str, category: str) -> dict[str, Any]:
    description = _DESCRIPTION_TEMPLATE.format(
        name=name,
        category_lower=category.lower(),
        audience=rng.choice(_AUDIENCES),
        feature_a=rng.choice(_FEATURES),
        feature_b=rng.choice(_FEATURES),
        perk=rng.choice(_PERKS),
    )
    return {"id": pid, "name": name, "category": category, "description": description}


def _make_coverage(rng: random.Random, pid: int, category: str,
                   count: int, offset: int) -> list[dict[str, Any]]:
    rows = []
    types = _COVERAGE_TYPES[category]
    for k in range(count):
        clause = rng.choice(_CONDITION_CLAUSES).format(wait=rng.choice([14, 30, 60, 90]))
        tail = rng.choice(_CONDITION_TAILS).format(
            pct=rng.choice([10, 20, 25, 30]), years=rng.choice([2, 3, 5]))
        rows.append({
            "id": offset + k + 1,
            "product_id": pid,
            "coverage_type": types[k % len(types)],
            "amount": float(rng.choice([10, 25, 50, 100, 250, 500, 1000]) * 1000),
            "deductible": float(rng.choice([0, 100, 250, 500, 750, 1000, 2500])),
            "conditions": f"{clause}, {tail}",
        })
    return rows


def _make_policy_term(rng: random.Random, pid: int, offset: int) -> dict[str, Any]:
    return {
        "id": offset + 1,
        "product_id": pid,
        "term_length": rng.choice(_TERM_LENGTHS),
        "renewal_policy": _RENEWAL_TEMPLATE.format(
            pct=rng.choice([3, 5, 8, 10]), notice=rng.choice([30, 45, 60])),
        "cancellation_policy": _CANCELLATION_TEMPLATE.format(
            notice=rng.choice([0, 14, 30]), fee=rng.choice([0, 25, 50]),
            window=rng.choice([14, 30])),
    }


def _make_faqs(rng: random.Random, pid: int, name: str,
               count: int, offset: int) -> list[dict[str, Any]]:
    rows = []
    for k in range(count):
        theme = _FAQ_THEMES[k % len(_FAQ_THEMES)]
        variant = (k // len(_FAQ_THEMES)) % 10
        question = _FAQ_QUESTIONS[theme][variant].format(name=name)
        answer = _FAQ_ANSWERS[theme].format(
            name=name,
            deductible=rng.choice([100, 250, 500, 750, 1000, 1500, 2500]),
            period=rng.choice(["policy year", "claim", "covered member per year"]),
            tier=rng.choice(_TIERS),
            pct=rng.choice([70, 80, 85, 90, 95]),
            discount=rng.choice([5, 8, 10, 12, 15]),
            credit=rng.choice([50, 100, 150]),
            days=rng.choice([3, 5, 7, 10, 14]),
            floor=rng.choice([100, 250, 500]),
            age_min=rng.choice([18, 21, 25]),
            age_max=rng.choice([64, 70, 75, 80]),
            exam_age=rng.choice([40, 45, 50, 55]),
            window=rng.choice([30, 60, 90]),
            states=rng.choice([42, 46, 48, 50]),
            notice=rng.choice([15, 30, 45, 60]),
            grace=rng.choice([10, 15, 30]),
            limit=f"{rng.choice([100, 250, 500, 1000, 2000]):,}000",
            incident=f"{rng.choice([10, 25, 50, 100]):,}000",
            step=f"{rng.choice([10, 25, 50]):,}000",
            oop=f"{rng.choice([2, 4, 6, 8, 13]):,}500",
        )
        rows.append({
            "id": offset + k + 1,
            "product_id": pid,
            "question": question,
            "answer": answer,
        })
    return rows


def _make_pricing(rng: random.Random, pid: int, count: int, offset: int) -> list[dict[str, Any]]:
    rows = []
    tier_names = ["Basic", "Standard", "Plus", "Gold", "Platinum"]
    for k in range(count):
        monthly = _money(rng, 1500 + 2500 * k, 6000 + 4000 * k)
        rows.append({
            "id": offset + k + 1,
            "product_id": pid,
            "tier_name": tier_names[k],
            "monthly_premium": monthly,
            "annual_premium": round(monthly * 12 * 0.95, 2),
            "age_min": 18 + 12 * k,
            "age_max": 29 + 12 * k,
        })
    return rows
